"""The four classifiers: Gaussian naive Bayes, CART, linear SVM and logistic regression.

All of them work on a :class:`FeatureMatrix` whose labels are 1 (buggy) and
0 (clean).  Every decision tie goes to buggy.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import TrainingError
from .preprocess import BUGGY, CLEAN, FeatureMatrix, Scaler, apply_scaler

ALGORITHMS = ("naive_bayes", "decision_tree", "linear_svm", "logistic_regression")
SHORT_NAMES = {"nb": "naive_bayes", "dt": "decision_tree", "svm": "linear_svm", "lr": "logistic_regression"}
ABBREVIATION = {v: k for k, v in SHORT_NAMES.items()}

DEFAULT_HYPERPARAMS: dict[str, dict[str, Any]] = {
    "naive_bayes": {"var_floor": 1e-9},
    "decision_tree": {"max_depth": 10, "min_samples_split": 2},
    "linear_svm": {"lambda": 1e-3, "epochs": 200},
    "logistic_regression": {"learning_rate": 0.1, "epochs": 500, "l2": 1e-4},
}


def canonical_algorithm(name: str) -> str:
    name = name.lower()
    if name in SHORT_NAMES:
        return SHORT_NAMES[name]
    if name in ALGORITHMS:
        return name
    raise TrainingError(f"unknown algorithm {name!r}; choose from {', '.join(SHORT_NAMES)}")


@dataclass(frozen=True)
class Model:
    algorithm: str
    parameters: dict
    kept_columns: tuple[str, ...]
    scaler: Scaler | None = None
    seed: int = 1
    hyperparams: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({"algorithm": self.algorithm, "parameters": self.parameters,
                           "kept_columns": list(self.kept_columns),
                           "scaler": self.scaler.to_json() if self.scaler else None,
                           "seed": self.seed, "hyperparams": self.hyperparams}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Model":
        d = json.loads(text)
        scaler = Scaler.from_json(d["scaler"]) if d.get("scaler") else None
        return cls(d["algorithm"], d["parameters"], tuple(d["kept_columns"]), scaler,
                   int(d["seed"]), d.get("hyperparams", {}))


def _check_training(train: FeatureMatrix):
    if train.y is None:
        raise TrainingError("training matrix has no labels")
    if train.n == 0:
        raise TrainingError("training matrix is empty")
    if len(np.unique(train.y)) < 2:
        raise TrainingError("training data contains a single class")


def train(algorithm: str, data: FeatureMatrix, hyperparams: dict | None = None, seed: int = 1,
          scaler: Scaler | None = None) -> Model:
    algorithm = canonical_algorithm(algorithm)
    _check_training(data)
    hp = dict(DEFAULT_HYPERPARAMS[algorithm])
    hp.update(hyperparams or {})
    fit = {"naive_bayes": _fit_nb, "decision_tree": _fit_tree,
           "linear_svm": _fit_svm, "logistic_regression": _fit_lr}[algorithm]
    params = fit(data.rows, data.y, hp, seed)
    return Model(algorithm, params, tuple(data.columns), scaler, seed, hp)


def prepare(model: Model, raw: FeatureMatrix) -> FeatureMatrix:
    """Select the model's columns from a raw matrix and apply its stored scaler."""
    m = raw.select(model.kept_columns)
    return apply_scaler(model.scaler, m) if model.scaler is not None else m


def decision_scores(model: Model, m: FeatureMatrix) -> np.ndarray:
    """Per-row score where ``>= threshold`` means buggy (posterior for NB/LR, margin for SVM, leaf share for DT)."""
    if tuple(m.columns) != model.kept_columns:
        missing = [c for c in model.kept_columns if c not in m.columns]
        extra = [c for c in m.columns if c not in model.kept_columns]
        raise TrainingError(f"column mismatch: missing {missing}, unexpected {extra}")
    x = m.rows
    p = model.parameters
    if model.algorithm == "naive_bayes":
        return _nb_posterior(p, x)
    if model.algorithm == "decision_tree":
        return np.array([_leaf(p["tree"], row)["buggy_share"] for row in x])
    w = np.array(p["weights"])
    return x @ w + p["bias"] if model.algorithm == "linear_svm" else _sigmoid(x @ w + p["bias"])


THRESHOLD = {"naive_bayes": 0.5, "decision_tree": 0.5, "linear_svm": 0.0, "logistic_regression": 0.5}


def predict(model: Model, m: FeatureMatrix) -> np.ndarray:
    scores = decision_scores(model, m)
    return np.where(scores >= THRESHOLD[model.algorithm], BUGGY, CLEAN).astype(np.int64)


# -- naive Bayes -------------------------------------------------------------

def _fit_nb(x: np.ndarray, y: np.ndarray, hp: dict, seed: int) -> dict:
    floor = float(hp["var_floor"])
    params = {}
    for cls, name in ((BUGGY, "buggy"), (CLEAN, "clean")):
        rows = x[y == cls]
        params[name] = {"prior": len(rows) / len(x),
                        "mean": rows.mean(axis=0).tolist(),
                        "var": np.maximum(rows.var(axis=0), floor).tolist()}
    return params


def _nb_log_joint(cls: dict, x: np.ndarray) -> np.ndarray:
    mean = np.array(cls["mean"])
    var = np.array(cls["var"])
    ll = -0.5 * (np.log(2 * np.pi * var) + (x - mean) ** 2 / var).sum(axis=1)
    return math.log(cls["prior"]) + ll


def _nb_posterior(p: dict, x: np.ndarray) -> np.ndarray:
    lb = _nb_log_joint(p["buggy"], x)
    lc = _nb_log_joint(p["clean"], x)
    # P(buggy | x) = 1 / (1 + exp(lc - lb)), computed without overflow
    return _sigmoid(lb - lc)


# -- decision tree -----------------------------------------------------------

def _gini(pos: np.ndarray, total: np.ndarray) -> np.ndarray:
    with np.errstate(invalid="ignore", divide="ignore"):
        p = np.where(total > 0, pos / np.maximum(total, 1), 0.0)
    return 2.0 * p * (1.0 - p)


def _best_split(x: np.ndarray, y: np.ndarray) -> tuple[int, float] | None:
    """Lowest weighted Gini over all features and midpoints; earlier feature/threshold wins ties."""
    n = len(y)
    best = None
    best_score = math.inf
    for j in range(x.shape[1]):
        order = np.argsort(x[:, j], kind="stable")
        xs = x[order, j]
        ys = y[order]
        boundaries = np.flatnonzero(xs[1:] != xs[:-1])  # split after position b
        if len(boundaries) == 0:
            continue
        left_n = boundaries + 1
        left_pos = np.cumsum(ys)[boundaries]
        right_n = n - left_n
        right_pos = ys.sum() - left_pos
        score = (left_n * _gini(left_pos, left_n) + right_n * _gini(right_pos, right_n)) / n
        i = int(np.argmin(score))
        if score[i] < best_score - 1e-12:
            best_score = float(score[i])
            b = boundaries[i]
            mid = (xs[b] + xs[b + 1]) / 2.0
            # adjacent floats can round the midpoint up onto the right value
            best = (j, float(mid if mid < xs[b + 1] else xs[b]))
    return best


def _make_leaf(y: np.ndarray) -> dict:
    buggy = int(y.sum())
    clean = int(len(y) - buggy)
    return {"leaf": True, "label": BUGGY if buggy >= clean else CLEAN,
            "counts": {"buggy": buggy, "clean": clean}, "buggy_share": buggy / len(y)}


def _grow(x: np.ndarray, y: np.ndarray, depth: int, hp: dict) -> dict:
    max_depth = hp["max_depth"]
    pure = y.min() == y.max()
    if pure or len(y) < hp["min_samples_split"] or (max_depth is not None and depth >= max_depth):
        return _make_leaf(y)
    split = _best_split(x, y)
    if split is None:
        return _make_leaf(y)
    j, thr = split
    mask = x[:, j] <= thr
    return {"leaf": False, "feature": j, "threshold": thr,
            "counts": {"buggy": int(y.sum()), "clean": int(len(y) - y.sum())},
            "left": _grow(x[mask], y[mask], depth + 1, hp),
            "right": _grow(x[~mask], y[~mask], depth + 1, hp)}


def _fit_tree(x: np.ndarray, y: np.ndarray, hp: dict, seed: int) -> dict:
    return {"tree": _grow(x, y, 0, hp)}


def _leaf(node: dict, row: np.ndarray) -> dict:
    while not node["leaf"]:
        node = node["left"] if row[node["feature"]] <= node["threshold"] else node["right"]
    return node


def tree_depth(node: dict) -> int:
    if node["leaf"]:
        return 0
    return 1 + max(tree_depth(node["left"]), tree_depth(node["right"]))


# -- linear SVM --------------------------------------------------------------

def _fit_svm(x: np.ndarray, y: np.ndarray, hp: dict, seed: int) -> dict:
    """Pegasos: stochastic subgradient steps on the regularized hinge loss, bias as an extra input."""
    lam = float(hp["lambda"])
    epochs = int(hp["epochs"])
    xa = np.column_stack([x, np.ones(len(x))])
    signs = np.where(y == BUGGY, 1.0, -1.0)
    w = np.zeros(xa.shape[1])
    rng = np.random.default_rng(seed)
    t = 0
    for _ in range(epochs):
        for i in rng.permutation(len(xa)):
            t += 1
            eta = 1.0 / (lam * t)
            margin = signs[i] * (xa[i] @ w)
            w *= 1.0 - eta * lam
            if margin < 1.0:
                w += eta * signs[i] * xa[i]
    if not np.all(np.isfinite(w)):
        raise TrainingError("SVM weights diverged")
    return {"weights": w[:-1].tolist(), "bias": float(w[-1])}


# -- logistic regression -----------------------------------------------------

def _sigmoid(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _fit_lr(x: np.ndarray, y: np.ndarray, hp: dict, seed: int) -> dict:
    lr = float(hp["learning_rate"])
    l2 = float(hp["l2"])
    n = len(x)
    w = np.zeros(x.shape[1])
    b = 0.0
    target = (y == BUGGY).astype(np.float64)
    for _ in range(int(hp["epochs"])):
        err = _sigmoid(x @ w + b) - target
        w -= lr * (x.T @ err / n + l2 * w)
        b -= lr * float(err.mean())
    if not np.all(np.isfinite(w)):
        raise TrainingError("logistic regression weights diverged")
    return {"weights": w.tolist(), "bias": b}


def train_all(data: FeatureMatrix, algorithms: Sequence[str] = ALGORITHMS, seed: int = 1,
              hyperparams: dict | None = None) -> dict[str, Model]:
    hyperparams = hyperparams or {}
    return {a: train(a, data, hyperparams.get(a), seed) for a in map(canonical_algorithm, algorithms)}
