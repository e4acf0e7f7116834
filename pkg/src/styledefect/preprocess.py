"""Standardization, VIF filtering and SMOTE oversampling of training matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import PreprocessError

BUGGY, CLEAN = 1, 0
R2_CEILING = 1.0 - 1e-12
TIE_TOLERANCE = 1e-9


def encode_labels(labels: Sequence[str]) -> np.ndarray:
    return np.array([BUGGY if lab == "buggy" else CLEAN for lab in labels], dtype=np.int64)


def decode_labels(y: Sequence[int]) -> list[str]:
    return ["buggy" if v == BUGGY else "clean" for v in y]


@dataclass(frozen=True)
class FeatureMatrix:
    columns: tuple[str, ...]
    rows: np.ndarray
    y: np.ndarray | None = None

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim == 1:
            rows = rows.reshape(-1, len(self.columns)) if self.columns else rows.reshape(len(rows), 0)
        if rows.ndim != 2 or rows.shape[1] != len(self.columns):
            raise PreprocessError(f"matrix has {rows.shape[-1]} columns, expected {len(self.columns)}")
        if not np.all(np.isfinite(rows)):
            bad = sorted({self.columns[j] for j in np.argwhere(~np.isfinite(rows))[:, 1]})
            raise PreprocessError("non-finite values in columns: " + ", ".join(bad))
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "rows", rows)
        if self.y is not None:
            y = np.asarray(self.y, dtype=np.int64)
            if y.shape != (rows.shape[0],):
                raise PreprocessError(f"label vector length {y.shape} does not match {rows.shape[0]} rows")
            object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    def select(self, columns: Sequence[str]) -> "FeatureMatrix":
        index = {c: j for j, c in enumerate(self.columns)}
        missing = [c for c in columns if c not in index]
        if missing:
            raise PreprocessError("unknown columns: " + ", ".join(missing))
        return FeatureMatrix(tuple(columns), self.rows[:, [index[c] for c in columns]], self.y)


# -- scaling -----------------------------------------------------------------

@dataclass(frozen=True)
class Scaler:
    columns: tuple[str, ...]
    mean: tuple[float, ...]
    std: tuple[float, ...]

    @property
    def constant(self) -> tuple[bool, ...]:
        return tuple(s == 0.0 for s in self.std)

    def to_json(self) -> dict:
        return {"columns": list(self.columns), "mean": list(self.mean), "std": list(self.std)}

    @classmethod
    def from_json(cls, d: dict) -> "Scaler":
        return cls(tuple(d["columns"]), tuple(float(x) for x in d["mean"]), tuple(float(x) for x in d["std"]))


def fit_scaler(train: FeatureMatrix) -> Scaler:
    if train.n == 0:
        raise PreprocessError("cannot fit a scaler on an empty matrix")
    mean = train.rows.mean(axis=0)
    std = train.rows.std(axis=0)
    return Scaler(train.columns, tuple(float(x) for x in mean), tuple(float(x) for x in std))


def apply_scaler(s: Scaler, m: FeatureMatrix) -> FeatureMatrix:
    if tuple(m.columns) != s.columns:
        raise PreprocessError(f"scaler columns {list(s.columns)} differ from matrix columns {list(m.columns)}")
    mean = np.array(s.mean)
    std = np.array(s.std)
    safe = np.where(std == 0.0, 1.0, std)
    z = (m.rows - mean) / safe
    z[:, std == 0.0] = 0.0
    return FeatureMatrix(m.columns, z, m.y)


# -- VIF ---------------------------------------------------------------------

def _r_squared(target: np.ndarray, others: np.ndarray) -> float:
    centered = target - target.mean()
    total = float(centered @ centered)
    if total == 0.0:
        return 1.0  # a constant column is fully explained by the intercept
    design = np.column_stack([np.ones(len(target)), others])
    coef, *_ = np.linalg.lstsq(design, target, rcond=None)
    resid = target - design @ coef
    return 1.0 - float(resid @ resid) / total


def vif_scores(m: FeatureMatrix) -> dict[str, float]:
    """VIF of each column regressed on all others plus an intercept; ``inf`` when R² ≈ 1."""
    d = len(m.columns)
    if d < 2:
        return {c: 1.0 for c in m.columns}
    scores = {}
    for j, col in enumerate(m.columns):
        r2 = _r_squared(m.rows[:, j], np.delete(m.rows, j, axis=1))
        scores[col] = math.inf if r2 >= R2_CEILING else 1.0 / (1.0 - r2)
    return scores


@dataclass
class VifReport:
    scores: dict[str, float]
    removed: list[tuple[str, float]] = field(default_factory=list)
    kept: list[str] = field(default_factory=list)
    final_scores: dict[str, float] = field(default_factory=dict)

    def to_json(self) -> dict:
        def enc(x):
            return "inf" if math.isinf(x) else x
        return {"scores": {k: enc(v) for k, v in self.scores.items()},
                "removed": [{"id": c, "score": enc(s)} for c, s in self.removed],
                "kept": list(self.kept)}


def _worst(scores: dict[str, float], order: Sequence[str]) -> str:
    """Column with the highest score; near-ties go to the later column."""
    worst = None
    for col in order:
        s = scores[col]
        if worst is None:
            worst = col
            continue
        w = scores[worst]
        if math.isinf(s) or math.isinf(w):
            tie_or_higher = s >= w
        else:
            tie_or_higher = s >= w - TIE_TOLERANCE * max(abs(s), abs(w))
        if tie_or_higher:
            worst = col
    return worst


def vif_filter(m: FeatureMatrix, threshold: float = 5.0) -> VifReport:
    """Drop the highest-VIF column while it exceeds ``threshold``, recomputing after each drop."""
    kept = list(m.columns)
    current = vif_scores(m)
    report = VifReport(scores=dict(current))
    while kept:
        worst = _worst(current, kept)
        if not current[worst] > threshold:
            break
        report.removed.append((worst, current[worst]))
        kept.remove(worst)
        current = vif_scores(m.select(kept))
    report.kept = kept
    report.final_scores = current
    return report


# -- SMOTE -------------------------------------------------------------------

def _neighbours(points: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k nearest other points for each point; distance ties go to the lower index."""
    out = np.empty((len(points), k), dtype=np.int64)
    positions = np.arange(len(points))
    for i, p in enumerate(points):
        dist = np.sqrt(((points - p) ** 2).sum(axis=1))
        order = np.lexsort((positions, dist))
        out[i] = order[order != i][:k]
    return out


def smote(train: FeatureMatrix, k: int = 5, seed: int = 1) -> FeatureMatrix:
    """Oversample the minority class with interpolated points until both classes are equal."""
    if train.y is None:
        raise PreprocessError("SMOTE needs labels")
    if k < 1:
        raise PreprocessError("SMOTE needs k >= 1")
    classes, counts = np.unique(train.y, return_counts=True)
    if len(classes) < 2:
        raise PreprocessError("nothing to balance: training data has a single class")
    if counts[0] == counts[1]:
        return train
    minority = classes[np.argmin(counts)]
    deficit = int(counts.max() - counts.min())
    idx = np.flatnonzero(train.y == minority)
    if len(idx) < 2:
        raise PreprocessError("SMOTE needs at least 2 minority samples to find a neighbour")
    points = train.rows[idx]
    kk = min(k, len(idx) - 1)
    nn = _neighbours(points, kk)
    rng = np.random.default_rng(seed)
    synthetic = np.empty((deficit, points.shape[1]))
    for s in range(deficit):
        i = s % len(points)
        z = points[nn[i, rng.integers(kk)]]
        u = rng.random()
        x = points[i]
        # clip guards against rounding pushing a point past its segment
        synthetic[s] = np.clip(x + u * (z - x), np.minimum(x, z), np.maximum(x, z))
    rows = np.vstack([train.rows, synthetic])
    y = np.concatenate([train.y, np.full(deficit, minority, dtype=np.int64)])
    return FeatureMatrix(train.columns, rows, y)
