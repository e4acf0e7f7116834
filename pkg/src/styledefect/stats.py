"""Wilcoxon signed-rank test: exact null distribution for small samples, normal approximation above."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

EXACT_MAX_N = 12
MIN_POWERED_N = 5
ALPHA = 0.05


@dataclass(frozen=True)
class WilcoxonResult:
    n_effective: int
    W: float
    w_plus: float
    w_minus: float
    p_one_sided: float
    p_two_sided: float
    significant_at_0_05: bool
    method: str
    underpowered: bool
    all_zero: bool

    def to_json(self) -> dict:
        return asdict(self)


def average_ranks(values: Sequence[float]) -> list[float]:
    """1-based ranks with tied values sharing the mean of their positions."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        shared = (i + j + 2) / 2.0
        for k in range(i, j + 1):
            ranks[order[k]] = shared
        i = j + 1
    return ranks


def _null_counts(doubled_ranks: Sequence[int]) -> dict[int, int]:
    """Number of sign patterns giving each doubled positive-rank sum (generating-function product)."""
    counts = {0: 1}
    for r in doubled_ranks:
        nxt = dict(counts)
        for s, c in counts.items():
            nxt[s + r] = nxt.get(s + r, 0) + c
        counts = nxt
    return counts


def exact_tails(ranks: Sequence[float], w_plus: float) -> tuple[float, float]:
    """P(T+ >= w_plus) and P(T+ <= w_plus) under the null."""
    doubled = [int(round(2 * r)) for r in ranks]
    target = int(round(2 * w_plus))
    counts = _null_counts(doubled)
    total = 2 ** len(ranks)
    upper = sum(c for s, c in counts.items() if s >= target)
    lower = sum(c for s, c in counts.items() if s <= target)
    return upper / total, lower / total


def _normal_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def normal_tails(ranks: Sequence[float], abs_diffs: Sequence[float], w_plus: float) -> tuple[float, float]:
    n = len(ranks)
    mean = n * (n + 1) / 4.0
    ties = {}
    for v in abs_diffs:
        ties[v] = ties.get(v, 0) + 1
    var = n * (n + 1) * (2 * n + 1) / 24.0 - sum(t ** 3 - t for t in ties.values()) / 48.0
    if var <= 0:
        return 1.0, 1.0
    sd = math.sqrt(var)
    upper = _normal_sf((w_plus - mean - 0.5) / sd)
    lower = _normal_sf((mean - w_plus - 0.5) / sd)
    return upper, lower


def wilcoxon_signed_rank(a: Sequence[float], b: Sequence[float]) -> WilcoxonResult:
    """Paired test of a against b; the one-sided alternative is a > b."""
    if len(a) != len(b):
        raise ValueError(f"paired samples differ in length: {len(a)} vs {len(b)}")
    diffs = [x - y for x, y in zip(a, b) if x - y != 0]
    n = len(diffs)
    if n == 0:
        return WilcoxonResult(0, 0.0, 0.0, 0.0, 1.0, 1.0, False, "none", True, True)
    absd = [abs(d) for d in diffs]
    ranks = average_ranks(absd)
    w_plus = float(sum(r for r, d in zip(ranks, diffs) if d > 0))
    w_minus = float(sum(r for r, d in zip(ranks, diffs) if d < 0))
    if n <= EXACT_MAX_N:
        upper, lower = exact_tails(ranks, w_plus)
        method = "exact"
    else:
        upper, lower = normal_tails(ranks, absd, w_plus)
        method = "normal"
    p_one = min(1.0, upper)
    p_two = min(1.0, 2.0 * min(upper, lower))
    return WilcoxonResult(n, min(w_plus, w_minus), w_plus, w_minus, p_one, p_two,
                          p_one < ALPHA, method, n < MIN_POWERED_N, False)
