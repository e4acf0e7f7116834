"""Precision, recall and F1 over buggy-vs-clean predictions, plus the acceptability rule."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

ACCEPT_RECALL = 70.0
ACCEPT_PRECISION = 50.0


def _is_buggy(v) -> bool:
    return v == "buggy" or (not isinstance(v, str) and int(v) == 1)


def precision_pct(tp: int, fp: int) -> float:
    return 100.0 * tp / (tp + fp) if tp + fp else 0.0


def recall_pct(tp: int, fn: int) -> float:
    return 100.0 * tp / (tp + fn) if tp + fn else 0.0


def f1_from(precision: float, recall: float) -> float:
    return 2.0 * precision * recall / (precision + recall) if precision + recall else 0.0


def is_acceptable(precision: float, recall: float) -> bool:
    """Both bounds are strict: recall above 70 and precision above 50."""
    return recall > ACCEPT_RECALL and precision > ACCEPT_PRECISION


@dataclass(frozen=True)
class EvaluationMetrics:
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, tp: int, fp: int, fn: int, tn: int = 0) -> "EvaluationMetrics":
        p = precision_pct(tp, fp)
        r = recall_pct(tp, fn)
        return cls(tp, fp, fn, tn, p, r, f1_from(p, r))

    @property
    def acceptable(self) -> bool:
        return is_acceptable(self.precision, self.recall)

    def to_json(self) -> dict:
        return asdict(self)


def evaluate(predicted: Sequence, truth: Sequence) -> EvaluationMetrics:
    """Confusion counts with buggy as the positive class.  Labels may be strings or 0/1."""
    if len(predicted) != len(truth):
        raise ValueError(f"{len(predicted)} predictions for {len(truth)} truth labels")
    tp = fp = fn = tn = 0
    for p, t in zip(predicted, truth):
        pb, tb = _is_buggy(p), _is_buggy(t)
        if pb and tb:
            tp += 1
        elif pb:
            fp += 1
        elif tb:
            fn += 1
        else:
            tn += 1
    return EvaluationMetrics.from_counts(tp, fp, fn, tn)
