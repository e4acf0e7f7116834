"""Command-line entry point: ``styledefect mine|extract|build|run|stats``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Sequence

from .errors import ConfigError, IngestionError, StyleDefectError

EXIT_OK, EXIT_PIPELINE, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("styledefect")


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="styledefect",
                                 description="SZZ labeling, style metrics and defect-prediction experiments.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True, metavar="command")

    for name, text in (("mine", "read histories, find bug fixes, label the selected releases"),
                       ("extract", "compute style metrics for every source file of each selected release"),
                       ("build", "join labels and metrics into per-release datasets and a summary")):
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument("config", help="TOML configuration file")

    run = sub.add_parser("run", help="train and evaluate classifiers", description="train and evaluate classifiers")
    run.add_argument("mode", choices=("within", "cross"))
    run.add_argument("config", help="TOML configuration file")
    run.add_argument("--algo", default="all", choices=("nb", "dt", "svm", "lr", "all"))
    run.add_argument("--limit", type=int, default=None, help="cross mode: evaluate at most N training sets per release")
    run.add_argument("--seed", type=int, default=None, help="override master_seed")

    stats = sub.add_parser("stats", help="statistics over finished reports")
    stats_sub = stats.add_subparsers(dest="test", required=True, metavar="test")
    w = stats_sub.add_parser("wilcoxon", help="paired Wilcoxon signed-rank test of per-release F1",
                             description="Compare F1 of two report files. Use REPORT:ALGO to pick a section "
                                         "of a multi-algorithm report.")
    w.add_argument("a", help="report JSON (first sample; the one-sided test asks whether it is greater)")
    w.add_argument("b", help="report JSON (second sample)")
    return ap


def _report_rows(ref: str) -> list[dict]:
    from .report import load_report, report_sections
    from .learners import canonical_algorithm
    path, _, algo = ref.partition(":") if ":" in ref and not ref.endswith(".json") else (ref, "", "")
    try:
        doc = load_report(path)
    except FileNotFoundError:
        raise ConfigError(f"report not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not a JSON report ({exc.msg})") from None
    sections = report_sections(doc)
    if algo:
        key = canonical_algorithm(algo)
        if key not in sections:
            raise ConfigError(f"{path} has no section for {key}")
        return sections[key]
    if len(sections) != 1:
        raise ConfigError(f"{path} holds several algorithms; name one as {path}:ALGO")
    return next(iter(sections.values()))


def _stats_wilcoxon(a: str, b: str) -> dict:
    from .stats import wilcoxon_signed_rank
    rows_a, rows_b = _report_rows(a), _report_rows(b)
    key = lambda r: (r["test"], tuple(r["training"])) if len(r["training"]) == 1 else (r["test"],)  # noqa: E731
    fa = {key(r): r["f1"] for r in rows_a}
    fb = {key(r): r["f1"] for r in rows_b}
    if set(fa) != set(fb):
        fa = {r["test"]: r["f1"] for r in rows_a}
        fb = {r["test"]: r["f1"] for r in rows_b}
    common = sorted(set(fa) & set(fb))
    if not common:
        raise StyleDefectError("the two reports share no test releases")
    result = wilcoxon_signed_rank([fa[k] for k in common], [fb[k] for k in common])
    return result.to_json()


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "stats":
            print(json.dumps(_stats_wilcoxon(args.a, args.b), indent=2))
            return EXIT_OK
        from . import pipeline
        from .config import load_config
        cfg = load_config(args.config)
        if args.command == "mine":
            print(json.dumps(pipeline.mine(cfg), indent=2))
        elif args.command == "extract":
            for path in pipeline.extract(cfg):
                print(path)
        elif args.command == "build":
            summaries = pipeline.build(cfg)
            print(json.dumps([s.to_json() for s in summaries], indent=2))
        else:
            for path in pipeline.run(cfg, args.mode, args.algo, args.limit, args.seed):
                print(path)
        return EXIT_OK
    except ConfigError as exc:
        print(f"styledefect: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IngestionError as exc:
        print(f"styledefect: error: {exc}", file=sys.stderr)
        return EXIT_USAGE if "releases file not found" in str(exc) else EXIT_PIPELINE
    except StyleDefectError as exc:
        print(f"styledefect: error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    except OSError as exc:
        print(f"styledefect: error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    raise SystemExit(main())
