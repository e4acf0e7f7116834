"""End-to-end stages behind the command line: mine, extract, build and run."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .config import Config
from .dataset import (ReleaseDataset, assemble, read_dataset, read_features, summarize, write_dataset,
                      write_features, write_summaries)
from .errors import ConfigError, PipelineError
from .experiment import MODES, Settings, cross_plans, run_plans, short_name, within_plans
from .learners import ALGORITHMS, canonical_algorithm
from .repo import (Release, check_releases, find_bug_fixes, load_releases, open_repository, read_archive,
                   select_releases, snapshot_files, write_archive)
from .report import build_report, dump_json, plot_means, plot_report, plot_summary, summary_table, text_tables
from .style.metrics import compute_metrics
from .szz import TraceStats, label_release, read_labels, trace_all, write_labels, write_spans

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Layout:
    root: Path

    def graph(self, project: str) -> Path:
        return self.root / "graphs" / f"{project}.jsonl"

    def fixes(self, project: str) -> Path:
        return self.root / "fixes" / f"{project}.json"

    def spans(self, project: str) -> Path:
        return self.root / "fixes" / f"{project}-spans.csv"

    def selected(self, project: str) -> Path:
        return self.root / "releases" / f"{project}.json"

    def labels(self, project: str) -> Path:
        return self.root / "labels" / f"{project}.csv"

    def features(self, release: str) -> Path:
        return self.root / "features" / f"{release}.csv"

    def dataset(self, release: str) -> Path:
        return self.root / "datasets" / f"{release}.csv"

    def summary(self) -> Path:
        return self.root / "datasets" / "summary.json"

    def report(self, mode: str, algo: str) -> Path:
        return self.root / "reports" / f"{mode}-{algo}.json"

    def figure(self, name: str) -> Path:
        return self.root / "reports" / "figures" / f"{name}.png"


def _write_json(obj, path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def _need(path: Path, stage: str) -> Path:
    if not path.exists():
        raise PipelineError(f"{path} is missing; run `{stage}` first")
    return path


def _project_releases(cfg: Config, name: str) -> list[Release]:
    project = cfg.project(name)
    releases = [r for r in load_releases(project.releases_file) if r.project == name]
    if not releases:
        raise ConfigError(f"{project.releases_file} lists no releases for project {name}")
    return releases


def selected_releases(cfg: Config, layout: Layout) -> list[Release]:
    out = []
    for p in cfg.projects:
        raw = json.loads(_need(layout.selected(p.name), "mine").read_text(encoding="utf-8"))
        out.extend(Release(**r) for r in raw)
    return sorted(out, key=lambda r: (r.project, r.timestamp))


# -- stages ------------------------------------------------------------------

def mine(cfg: Config) -> dict:
    layout = Layout(cfg.output_dir)
    done = {}
    for p in cfg.projects:
        releases = _project_releases(cfg, p.name)
        graph = open_repository(p.source, branch=cfg.branch, extensions=cfg.extensions)
        resolve = getattr(graph, "resolve_ref", None)
        if resolve is not None:
            releases = [r if r.commit_id in graph else Release(r.timestamp, r.project, r.label, resolve(r.commit_id))
                        for r in releases]
        check_releases(graph, releases)
        fixes = find_bug_fixes(graph, cfg.keywords)
        stats = TraceStats()
        spans = trace_all(graph, [c for c, _ in fixes], stats)
        chosen = select_releases(releases, graph.first_timestamp(), graph.last_timestamp())
        labels, snapshots = [], {}
        for rel in chosen:
            files = snapshot_files(graph, rel)
            snapshots[rel.commit_id] = dict(files)
            labels.extend(label_release(graph, rel, spans, [path for path, _ in files]))
        for path in (layout.graph(p.name), layout.labels(p.name), layout.spans(p.name)):
            path.parent.mkdir(parents=True, exist_ok=True)
        write_archive(graph, layout.graph(p.name), snapshots)
        _write_json([{"id": c.id, "keywords": kw} for c, kw in fixes], layout.fixes(p.name))
        write_spans(spans, layout.spans(p.name))
        _write_json([r.to_json() for r in chosen], layout.selected(p.name))
        write_labels(labels, layout.labels(p.name))
        if stats.untraceable_lines:
            log.warning("%s: %d removed lines could not be traced", p.name, stats.untraceable_lines)
        done[p.name] = {"commits": len(graph), "fixes": len(fixes), "spans": len(spans),
                        "releases": [r.label for r in chosen], "untraceable_lines": stats.untraceable_lines}
    return done


def extract(cfg: Config) -> list[Path]:
    layout = Layout(cfg.output_dir)
    written = []
    for p in cfg.projects:
        graph = read_archive(_need(layout.graph(p.name), "mine"), extensions=cfg.extensions)
        raw = json.loads(_need(layout.selected(p.name), "mine").read_text(encoding="utf-8"))
        for r in raw:
            rel = Release(**r)
            features = [(path, compute_metrics(text)) for path, text in snapshot_files(graph, rel)]
            out = layout.features(rel.label)
            out.parent.mkdir(parents=True, exist_ok=True)
            write_features(rel.label, features, out)
            written.append(out)
    return written


def build(cfg: Config) -> list:
    layout = Layout(cfg.output_dir)
    summaries = []
    for p in cfg.projects:
        labels = read_labels(_need(layout.labels(p.name), "mine"))
        raw = json.loads(_need(layout.selected(p.name), "mine").read_text(encoding="utf-8"))
        for r in raw:
            rel = Release(**r)
            _, features = read_features(_need(layout.features(rel.label), "extract"))
            ds = assemble(rel, [lab for lab in labels if lab.release_label == rel.label], features)
            out = layout.dataset(rel.label)
            out.parent.mkdir(parents=True, exist_ok=True)
            write_dataset(ds, out)
            summaries.append(summarize(ds))
    write_summaries(summaries, layout.summary())
    layout.summary().with_suffix(".txt").write_text(summary_table(summaries), encoding="utf-8")
    plot_summary(summaries, layout.figure("dataset-summary"))
    return summaries


def load_datasets(cfg: Config, layout: Layout, releases: Sequence[Release]) -> dict[str, ReleaseDataset]:
    return {r.label: read_dataset(_need(layout.dataset(r.label), "build"), release=r) for r in releases}


def run(cfg: Config, mode: str, algo: str = "all", limit: int | None = None, seed: int | None = None) -> list[Path]:
    if mode not in MODES:
        raise ConfigError(f"mode must be within or cross, got {mode!r}")
    layout = Layout(cfg.output_dir)
    seed = cfg.master_seed if seed is None else seed
    algorithms = list(ALGORITHMS) if algo == "all" else [canonical_algorithm(algo)]
    releases = selected_releases(cfg, layout)
    datasets = load_datasets(cfg, layout, releases)
    if mode == "within":
        plans = within_plans(releases, algorithms)
    else:
        plans = cross_plans(releases, algorithms, cfg.max_combo_size, limit)
    if not plans:
        raise PipelineError(f"no {mode}-project plans: need at least two selected releases")
    settings = Settings(cfg.vif_threshold, cfg.smote_k, cfg.hyperparams)
    outcome = run_plans(plans, datasets, settings, seed)
    projects = {r.label: r.project for r in releases}
    written = []
    docs = []
    if algo == "all":
        docs.append(("all", build_report(mode, algorithms, outcome.results, outcome.failures, seed, label="all")))
    for a in algorithms:
        docs.append((short_name(a), build_report(mode, [a], [r for r in outcome.results if r.plan.algorithm == a],
                                     outcome.failures, seed)))
    for name, doc in docs:
        path = layout.report(mode, name)
        path.parent.mkdir(parents=True, exist_ok=True)
        dump_json(doc, path)
        path.with_suffix(".txt").write_text(text_tables(doc, projects), encoding="utf-8")
        plot_report(doc, layout.figure(f"{mode}-{name}"))
        if name == "all":
            plot_means(doc, layout.figure(f"{mode}-means"))
        written.append(path)
    return written
