"""Experiment reports: JSON documents, plain-text tables and matplotlib figures."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping, Sequence

from .dataset import DatasetSummary
from .experiment import (Aggregate, ExperimentPlan, ExperimentResult, aggregate, headline_rows, round_half_up,
                         short_name)
from .stats import WilcoxonResult

PLACES = 2
CROSS_NOTE = ("The training set per release is the one with the best F1 on that release's own test data, "
              "so cross-project figures are optimistic.")


def _pct(x: float) -> float:
    return round_half_up(x, PLACES)


def row_json(r: ExperimentResult) -> dict:
    m = r.metrics
    return {"test": r.plan.test_release, "training": list(r.plan.training_releases),
            "tp": m.tp, "fp": m.fp, "fn": m.fn, "tn": m.tn,
            "precision": _pct(m.precision), "recall": _pct(m.recall), "f1": _pct(m.f1),
            "acceptable": r.acceptable}


def wilcoxon_json(a: str, b: str, w: WilcoxonResult) -> dict:
    return {"algA": a, "algB": b, "W": w.W, "p_one_sided": w.p_one_sided, "p_two_sided": w.p_two_sided,
            "significant": w.significant_at_0_05, "n_effective": w.n_effective, "method": w.method,
            "underpowered": w.underpowered}


def _means_json(agg: Aggregate, algo: str) -> dict:
    m = agg.means.get(algo)
    if m is None:
        return {"precision": 0.0, "recall": 0.0, "f1": 0.0}
    return {"precision": _pct(m.precision), "recall": _pct(m.recall), "f1": _pct(m.f1)}


def build_report(mode: str, algorithms: Sequence[str], results: Sequence[ExperimentResult],
                 failures: Sequence[tuple[ExperimentPlan, str]], seed: int, label: str | None = None) -> dict:
    """Report document for one algorithm, or for several (``label`` = "all") with one section each."""
    rows = headline_rows(mode, results)
    by_algo = {a: [r for r in rows if r.plan.algorithm == a] for a in algorithms}
    agg = aggregate(by_algo)
    candidates: dict[tuple[str, str], int] = {}
    for r in results:
        key = (r.plan.algorithm, r.plan.test_release)
        candidates[key] = candidates.get(key, 0) + 1
    skipped = [{"algorithm": p.algorithm, "test": p.test_release, "training": list(p.training_releases),
                "reason": reason} for p, reason in failures if p.algorithm in algorithms]
    wilcoxon = [wilcoxon_json(a, b, w) for a, b, w in agg.comparisons]

    def rows_json(algo):
        out = []
        for r in by_algo[algo]:
            d = row_json(r)
            if mode == "cross":
                d["candidates"] = candidates[(algo, r.plan.test_release)]
            out.append(d)
        return out

    if len(algorithms) == 1 and label is None:
        algo = algorithms[0]
        doc = {"mode": mode, "algorithm": algo, "seed": seed, "rows": rows_json(algo),
               "means": _means_json(agg, algo), "wilcoxon": wilcoxon}
    else:
        doc = {"mode": mode, "algorithm": label or "all", "seed": seed,
               "sections": [{"algorithm": a, "rows": rows_json(a), "means": _means_json(agg, a)}
                            for a in algorithms],
               "means": {a: _means_json(agg, a) for a in algorithms},
               "best_algorithm": agg.best_algorithm, "wilcoxon": wilcoxon}
    doc["skipped"] = skipped
    if mode == "cross":
        doc["note"] = CROSS_NOTE
    return doc


def dump_json(doc, path: str | Path):
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_report(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def report_sections(doc: Mapping) -> dict[str, list[dict]]:
    if "sections" in doc:
        return {s["algorithm"]: s["rows"] for s in doc["sections"]}
    return {doc["algorithm"]: doc["rows"]}


# -- text tables -------------------------------------------------------------

def _table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]

    def line(cells):
        return " | ".join(str(c).ljust(w) for c, w in zip(cells, widths)).rstrip()
    sep = "-+-".join("-" * w for w in widths)
    return "\n".join([line(header), sep, *(line(r) for r in rows)])


def _int(x: float) -> str:
    return str(round_half_up(x))


def _release_tail(label: str, project: str | None) -> str:
    if project and label.startswith(project + "-"):
        return label[len(project) + 1:]
    return label


def text_tables(doc: Mapping, projects: Mapping[str, str] | None = None) -> str:
    """Plain-text rendering: means per algorithm, then per-release rows (starred when acceptable)."""
    projects = projects or {}
    sections = report_sections(doc)
    means = doc["means"] if "sections" in doc else {doc["algorithm"]: doc["means"]}
    parts = []
    algos = list(sections)
    header = ["Indicator", *(short_name(a).upper() for a in algos)]
    rows = [[f"Mean({name})", *(f"{means[a][key]:.2f}" for a in algos)]
            for name, key in (("F1", "f1"), ("Precision", "precision"), ("Recall", "recall"))]
    parts.append(f"{doc['mode']}-project means\n" + _table(header, rows))
    for algo, rs in sections.items():
        title = f"{doc['mode']}-project results, {algo}"
        if doc["mode"] == "within":
            body = []
            for r in rs:
                project = projects.get(r["test"], "")
                star = "*" if r["acceptable"] else ""
                releases = f"{_release_tail(r['training'][0], project)} -> {_release_tail(r['test'], project)}"
                body.append([star + (project or r["test"]), releases, _int(r["precision"]),
                             _int(r["recall"]), _int(r["f1"])])
            table = _table(["Project", "Releases (Tr -> T)", "Precision", "Recall", "F1"], body)
        else:
            body = []
            for r in rs:
                train = list(r["training"]) + ["-"] * (3 - len(r["training"]))
                body.append([("*" if r["acceptable"] else "") + r["test"], *train[:3], _int(r["precision"]),
                             _int(r["recall"]), _int(r["f1"])])
            table = _table(["Release", "Release1", "Release2", "Release3", "Precision", "Recall", "F"], body)
        m = means[algo]
        footer = f"Mean: precision {m['precision']:.2f}, recall {m['recall']:.2f}, f1 {m['f1']:.2f}"
        parts.append(f"{title}\n{table}\n{footer}")
    if doc.get("wilcoxon"):
        body = [[w["algA"], w["algB"], f"{w['W']:g}", f"{w['p_one_sided']:.4f}", f"{w['p_two_sided']:.4f}",
                 "yes" if w["significant"] else "no"] for w in doc["wilcoxon"]]
        parts.append("Wilcoxon signed-rank on per-release F1\n"
                     + _table(["Best", "Other", "W", "p (one-sided)", "p (two-sided)", "significant"], body))
    if doc.get("skipped"):
        parts.append(f"{len(doc['skipped'])} plan(s) skipped; see the JSON report for reasons.")
    if doc.get("note"):
        parts.append(doc["note"])
    return "\n\n".join(parts) + "\n"


def summary_table(summaries: Sequence[DatasetSummary]) -> str:
    rows = [[s.release_label, str(s.total_files), str(s.buggy_files), f"{s.pct_buggy:.2f}"] for s in summaries]
    return _table(["Release", "Total files", "Buggy files", "% buggy"], rows) + "\n"


# -- figures -----------------------------------------------------------------

def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _save(fig, path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=100, metadata={"Software": None})


def plot_report(doc: Mapping, path: str | Path) -> Path:
    """Grouped bars of precision, recall and F1 per test release, one panel per algorithm."""
    plt = _pyplot()
    sections = report_sections(doc)
    fig, axes = plt.subplots(len(sections), 1, figsize=(max(6.0, 0.9 * max(len(r) for r in sections.values()) + 2),
                                                      3.2 * len(sections)), squeeze=False)
    for ax, (algo, rows) in zip(axes[:, 0], sections.items()):
        labels = [r["test"] if doc["mode"] == "cross" else f"{r['training'][0]}\n-> {r['test']}" for r in rows]
        xs = range(len(rows))
        for offset, key in ((-0.27, "precision"), (0.0, "recall"), (0.27, "f1")):
            ax.bar([x + offset for x in xs], [r[key] for r in rows], width=0.27, label=key)
        ax.axhline(70, color="grey", linestyle=":", linewidth=1)
        ax.axhline(50, color="grey", linestyle="--", linewidth=1)
        ax.set_xticks(list(xs))
        ax.set_xticklabels(labels, fontsize=7, rotation=30, ha="right")
        ax.set_ylim(0, 105)
        ax.set_ylabel("%")
        ax.set_title(f"{doc['mode']}-project, {algo}")
        ax.legend(fontsize=7, loc="lower right")
    fig.tight_layout()
    out = Path(path)
    _save(fig, out)
    plt.close(fig)
    return out


def plot_means(doc: Mapping, path: str | Path) -> Path:
    plt = _pyplot()
    means = doc["means"] if "sections" in doc else {doc["algorithm"]: doc["means"]}
    algos = list(means)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    xs = range(len(algos))
    for offset, key in ((-0.27, "precision"), (0.0, "recall"), (0.27, "f1")):
        ax.bar([x + offset for x in xs], [means[a][key] for a in algos], width=0.27, label=key)
    ax.set_xticks(list(xs))
    ax.set_xticklabels([short_name(a).upper() for a in algos])
    ax.set_ylim(0, 105)
    ax.set_title(f"{doc['mode']}-project mean scores")
    ax.legend(fontsize=8)
    fig.tight_layout()
    out = Path(path)
    _save(fig, out)
    plt.close(fig)
    return out


def plot_summary(summaries: Sequence[DatasetSummary], path: str | Path) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(max(5.0, 0.6 * len(summaries) + 2), 3.5))
    ax.bar(range(len(summaries)), [float(s.pct_buggy) for s in summaries], color="tab:red")
    ax.set_xticks(range(len(summaries)))
    ax.set_xticklabels([s.release_label for s in summaries], rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("% buggy files")
    ax.set_ylim(0, 100)
    fig.tight_layout()
    out = Path(path)
    _save(fig, out)
    plt.close(fig)
    return out
