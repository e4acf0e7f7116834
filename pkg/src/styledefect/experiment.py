"""Within-project and cross-project experiment protocols, best-combination selection and aggregation."""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from statistics import fmean
from typing import Mapping, Sequence

import numpy as np

from .dataset import ReleaseDataset
from .errors import PipelineError, StyleDefectError
from .evaluation import EvaluationMetrics, evaluate, is_acceptable
from .learners import ABBREVIATION, ALGORITHMS, canonical_algorithm, predict, train
from .preprocess import FeatureMatrix, apply_scaler, encode_labels, fit_scaler, smote, vif_filter
from .repo import Release
from .stats import WilcoxonResult, wilcoxon_signed_rank
from .style.metrics import METRIC_IDS

log = logging.getLogger(__name__)

MODES = ("within", "cross")


@dataclass(frozen=True)
class ExperimentPlan:
    mode: str
    test_release: str
    training_releases: tuple[str, ...]
    algorithm: str

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be within or cross, got {self.mode!r}")
        if not self.training_releases:
            raise ValueError("a plan needs at least one training release")
        object.__setattr__(self, "training_releases", tuple(self.training_releases))
        object.__setattr__(self, "algorithm", canonical_algorithm(self.algorithm))

    def describe(self) -> str:
        return f"{self.mode}/{self.algorithm}: {' + '.join(self.training_releases)} -> {self.test_release}"


@dataclass(frozen=True)
class ExperimentResult:
    plan: ExperimentPlan
    metrics: EvaluationMetrics
    seed: int
    kept_columns: tuple[str, ...] = ()

    @property
    def acceptable(self) -> bool:
        return is_acceptable(self.metrics.precision, self.metrics.recall)


@dataclass(frozen=True)
class Settings:
    vif_threshold: float = 5.0
    smote_k: int = 5
    hyperparams: Mapping[str, dict] = field(default_factory=dict)


# -- plan generation ---------------------------------------------------------

def _by_project(releases: Sequence[Release]) -> dict[str, list[Release]]:
    groups: dict[str, list[Release]] = {}
    for r in releases:
        groups.setdefault(r.project, []).append(r)
    return {p: sorted(rs) for p, rs in sorted(groups.items())}


def within_project_pairs(releases: Sequence[Release]) -> list[tuple[Release, Release]]:
    """Consecutive (train, test) release pairs inside each project."""
    pairs = []
    for rs in _by_project(releases).values():
        pairs.extend(zip(rs, rs[1:]))
    return pairs


def _spread(n: int, limit: int) -> list[int]:
    if limit >= n:
        return list(range(n))
    if limit == 1:
        return [0]
    return sorted({int(math.floor(k * (n - 1) / (limit - 1) + 0.5)) for k in range(limit)})


def cross_project_combos(test: Release, releases: Sequence[Release], max_size: int = 3,
                         limit: int | None = None) -> list[tuple[Release, ...]]:
    """Every set of 1..max_size foreign releases, smaller sets first, each size in label order.

    ``limit`` keeps that many sets spread evenly over the full list.
    """
    foreign = sorted((r for r in releases if r.project != test.project), key=lambda r: r.label)
    if not foreign:
        raise PipelineError(f"no releases from other projects to train on for {test.label}")
    combos = []
    for size in range(1, max_size + 1):
        combos.extend(itertools.combinations(foreign, size))
    if limit is not None:
        if limit < 1:
            raise PipelineError("--limit must be at least 1")
        combos = [combos[i] for i in _spread(len(combos), limit)]
    return combos


def within_plans(releases: Sequence[Release], algorithms: Sequence[str]) -> list[ExperimentPlan]:
    return [ExperimentPlan("within", test.label, (tr.label,), a)
            for tr, test in within_project_pairs(releases) for a in algorithms]


def cross_plans(releases: Sequence[Release], algorithms: Sequence[str], max_size: int = 3,
                limit: int | None = None) -> list[ExperimentPlan]:
    plans = []
    by_label = {r.label: r for r in releases}
    for test in sorted(releases, key=lambda r: r.label):
        for combo in cross_project_combos(test, releases, max_size, limit):
            for a in algorithms:
                plan = ExperimentPlan("cross", test.label, tuple(r.label for r in combo), a)
                assert all(by_label[t].project != test.project for t in plan.training_releases)
                plans.append(plan)
    return plans


# -- execution ---------------------------------------------------------------

def dataset_matrix(ds: ReleaseDataset) -> FeatureMatrix:
    rows = np.array([r.features.values for r in ds.rows], dtype=np.float64).reshape(len(ds.rows), len(METRIC_IDS))
    return FeatureMatrix(METRIC_IDS, rows, encode_labels(ds.labels()))


@dataclass(frozen=True)
class PreparedData:
    train: FeatureMatrix
    test: FeatureMatrix
    kept_columns: tuple[str, ...]


def prepare_data(training: Sequence[str], test: str, datasets: Mapping[str, ReleaseDataset],
                 settings: Settings, seed: int) -> PreparedData:
    """VIF filter and scaler fitted on training rows only, then SMOTE on the scaled training rows."""
    missing = [lab for lab in (*training, test) if lab not in datasets]
    if missing:
        raise PipelineError(f"no dataset loaded for {', '.join(missing)}")
    parts = [dataset_matrix(datasets[lab]) for lab in training]
    raw_train = FeatureMatrix(METRIC_IDS, np.vstack([p.rows for p in parts]), np.concatenate([p.y for p in parts]))
    raw_test = dataset_matrix(datasets[test])
    report = vif_filter(raw_train, settings.vif_threshold)
    kept = tuple(report.kept)
    train_m = raw_train.select(kept)
    scaler = fit_scaler(train_m)
    train_m = apply_scaler(scaler, train_m)
    test_m = apply_scaler(scaler, raw_test.select(kept))
    train_m = smote(train_m, settings.smote_k, seed)
    return PreparedData(train_m, test_m, kept)


def run_prepared(plan: ExperimentPlan, data: PreparedData, settings: Settings, seed: int) -> ExperimentResult:
    model = train(plan.algorithm, data.train, settings.hyperparams.get(plan.algorithm), seed)
    predicted = predict(model, data.test)
    return ExperimentResult(plan, evaluate(predicted, data.test.y), seed, data.kept_columns)


def run_plan(plan: ExperimentPlan, datasets: Mapping[str, ReleaseDataset], settings: Settings | None = None,
             seed: int = 1) -> ExperimentResult:
    settings = settings or Settings()
    try:
        data = prepare_data(plan.training_releases, plan.test_release, datasets, settings, seed)
        return run_prepared(plan, data, settings, seed)
    except StyleDefectError as exc:
        raise PipelineError(f"{plan.describe()}: {exc}") from exc


@dataclass
class RunOutcome:
    results: list[ExperimentResult]
    failures: list[tuple[ExperimentPlan, str]]


def run_plans(plans: Sequence[ExperimentPlan], datasets: Mapping[str, ReleaseDataset],
              settings: Settings | None = None, seed: int = 1) -> RunOutcome:
    """Run plans sharing preprocessing across algorithms.  Failing plans are collected, not raised."""
    settings = settings or Settings()
    groups: dict[tuple, list[ExperimentPlan]] = {}
    for p in plans:
        groups.setdefault((p.test_release, p.training_releases), []).append(p)
    results, failures = [], []
    for (test, training), group in groups.items():
        try:
            data = prepare_data(training, test, datasets, settings, seed)
        except StyleDefectError as exc:
            for p in group:
                failures.append((p, str(exc)))
                log.warning("skipping %s: %s", p.describe(), exc)
            continue
        for p in group:
            try:
                results.append(run_prepared(p, data, settings, seed))
            except StyleDefectError as exc:
                failures.append((p, str(exc)))
                log.warning("skipping %s: %s", p.describe(), exc)
    results.sort(key=lambda r: (r.plan.algorithm, r.plan.test_release, r.plan.training_releases))
    failures.sort(key=lambda f: (f[0].algorithm, f[0].test_release, f[0].training_releases))
    return RunOutcome(results, failures)


# -- selection and aggregation ----------------------------------------------

def best_combo(results: Sequence[ExperimentResult]) -> ExperimentResult:
    """Highest F1, then higher recall, then the lexicographically smallest training list."""
    if not results:
        raise PipelineError("no results to choose from")
    tests = {r.plan.test_release for r in results}
    algos = {r.plan.algorithm for r in results}
    if len(tests) > 1 or len(algos) > 1:
        raise PipelineError("best_combo needs results for one test release and one algorithm")
    return min(results, key=lambda r: (-r.metrics.f1, -r.metrics.recall, list(r.plan.training_releases)))


def best_per_release(results: Sequence[ExperimentResult]) -> list[ExperimentResult]:
    groups: dict[tuple[str, str], list[ExperimentResult]] = {}
    for r in results:
        groups.setdefault((r.plan.algorithm, r.plan.test_release), []).append(r)
    return [best_combo(g) for _, g in sorted(groups.items())]


def headline_rows(mode: str, results: Sequence[ExperimentResult]) -> list[ExperimentResult]:
    """Rows the tables and means are built from: every pair (within) or the best set per release (cross)."""
    if mode == "cross":
        return best_per_release(results)
    return sorted(results, key=lambda r: (r.plan.algorithm, r.plan.test_release))


@dataclass(frozen=True)
class Means:
    precision: float
    recall: float
    f1: float


@dataclass
class Aggregate:
    means: dict[str, Means]
    best_algorithm: str | None
    comparisons: list[tuple[str, str, WilcoxonResult]]


def _row_key(r: ExperimentResult):
    return (r.plan.test_release, r.plan.training_releases) if r.plan.mode == "within" else r.plan.test_release


def aggregate(rows_by_algorithm: Mapping[str, Sequence[ExperimentResult]]) -> Aggregate:
    """Mean P/R/F1 per algorithm and Wilcoxon tests of the best-mean-F1 algorithm against the rest."""
    means = {}
    for algo in sorted(rows_by_algorithm, key=_algo_order):
        rows = rows_by_algorithm[algo]
        if rows:
            means[algo] = Means(fmean(r.metrics.precision for r in rows), fmean(r.metrics.recall for r in rows),
                                fmean(r.metrics.f1 for r in rows))
    if not means:
        return Aggregate({}, None, [])
    best = max(means, key=lambda a: (means[a].f1, -_algo_order(a)))
    comparisons = []
    best_rows = {_row_key(r): r.metrics.f1 for r in rows_by_algorithm[best]}
    for algo in means:
        if algo == best:
            continue
        other = {_row_key(r): r.metrics.f1 for r in rows_by_algorithm[algo]}
        keys = sorted(set(best_rows) & set(other))
        comparisons.append((best, algo, wilcoxon_signed_rank([best_rows[k] for k in keys],
                                                             [other[k] for k in keys])))
    return Aggregate(means, best, comparisons)


def _algo_order(a: str) -> int:
    return ALGORITHMS.index(a) if a in ALGORITHMS else len(ALGORITHMS)


def round_half_up(x: float, places: int = 0) -> float:
    q = Decimal(1).scaleb(-places)
    value = Decimal(repr(x)).quantize(q, rounding=ROUND_HALF_UP)
    return int(value) if places == 0 else float(value)


def short_name(algorithm: str) -> str:
    return ABBREVIATION.get(algorithm, algorithm)
