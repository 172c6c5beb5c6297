"""Wilcoxon signed-rank, chi-square with Yates correction, Cohen's kappa, precision/recall."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import AllZeroDifferences, DegenerateTable, LengthMismatch

ALPHA = 0.05
EXACT_MAX_N = 12


@dataclass(frozen=True)
class PairedSamples:
    a: tuple[float, ...]
    b: tuple[float, ...]
    keys: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(self.a))
        object.__setattr__(self, "b", tuple(self.b))
        if len(self.a) != len(self.b):
            raise LengthMismatch(f"paired samples differ in length: {len(self.a)} vs {len(self.b)}")
        if not self.a:
            raise LengthMismatch("paired samples are empty")
        if self.keys is not None:
            object.__setattr__(self, "keys", tuple(self.keys))
            if len(self.keys) != len(self.a):
                raise LengthMismatch("pairing keys do not match sample length")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __post_init__(self):
        for name in ("tp", "fp", "tn", "fn"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class StatResult:
    statistic: float
    p_value: float
    method: str = ""


@dataclass(frozen=True)
class PrecisionRecall:
    precision: float
    recall: float
    precision_defined: bool = True
    recall_defined: bool = True


# ----------------------------------------------------------------- Wilcoxon

def signed_ranks(diffs: Sequence[float]) -> list[float]:
    """Average ranks of ``|d|`` (ties share the mean rank), signed like ``d``."""
    order = sorted(range(len(diffs)), key=lambda i: abs(diffs[i]))
    ranks = [0.0] * len(diffs)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and abs(diffs[order[j + 1]]) == abs(diffs[order[i]]):
            j += 1
        mean_rank = (i + j + 2) / 2
        for k in range(i, j + 1):
            ranks[order[k]] = mean_rank
        i = j + 1
    return [r if d > 0 else -r for r, d in zip(ranks, diffs)]


def _exact_p(abs_ranks: list[float], t: float) -> float:
    # ranks are multiples of 1/2, so doubled ranks are integers
    doubled = [int(round(2 * r)) for r in abs_ranks]
    total = sum(doubled)
    counts = [0] * (total + 1)
    counts[0] = 1
    for r in doubled:
        for s in range(total, r - 1, -1):
            counts[s] += counts[s - r]
    t2 = int(round(2 * t))
    hits = sum(c for s, c in enumerate(counts) if min(s, total - s) <= t2)
    return hits / 2 ** len(doubled)


def wilcoxon_signed_rank(samples: PairedSamples, exact_max_n: int = EXACT_MAX_N) -> StatResult:
    """Two-sided Wilcoxon signed-rank test on ``a - b``.

    Zero differences are dropped. The statistic is ``min(W+, W-)``. For at most
    ``exact_max_n`` non-zero differences the p-value is the exact null
    probability of a statistic no larger than the observed one; beyond that a
    normal approximation with tie correction is used.
    """
    diffs = [x - y for x, y in zip(samples.a, samples.b) if x != y]
    if not diffs:
        raise AllZeroDifferences("all paired differences are zero")
    ranks = signed_ranks(diffs)
    w_plus = sum(r for r in ranks if r > 0)
    w_minus = -sum(r for r in ranks if r < 0)
    t = min(w_plus, w_minus)
    n = len(diffs)
    if n <= exact_max_n:
        return StatResult(t, min(1.0, _exact_p([abs(r) for r in ranks], t)), "exact")
    mean = n * (n + 1) / 4
    ties = Counter(abs(r) for r in ranks)
    var = n * (n + 1) * (2 * n + 1) / 24 - sum(c ** 3 - c for c in ties.values()) / 48
    if var <= 0:
        return StatResult(t, 1.0, "normal")
    z = (t - mean) / math.sqrt(var)
    p = math.erfc(abs(z) / math.sqrt(2))
    return StatResult(t, min(1.0, p), "normal")


# ---------------------------------------------------------------- chi-square

def regularized_gamma_q(a: float, x: float, eps: float = 1e-14, max_iter: int = 10_000) -> float:
    """Upper regularized incomplete gamma ``Q(a, x)``.

    Series expansion below ``x < a + 1``, Lentz continued fraction above.
    """
    if a <= 0:
        raise ValueError("a must be positive")
    if x < 0:
        raise ValueError("x must be non-negative")
    if x == 0:
        return 1.0
    log_prefix = a * math.log(x) - x - math.lgamma(a)
    if x < a + 1:
        term = 1.0 / a
        total = term
        ap = a
        for _ in range(max_iter):
            ap += 1
            term *= x / ap
            total += term
            if abs(term) < abs(total) * eps:
                break
        return max(0.0, 1.0 - total * math.exp(log_prefix))
    tiny = 1e-300
    b = x + 1 - a
    c = 1 / tiny
    d = 1 / b
    h = d
    for i in range(1, max_iter):
        an = -i * (i - a)
        b += 2
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1 / d
        delta = d * c
        h *= delta
        if abs(delta - 1) < eps:
            break
    return min(1.0, math.exp(log_prefix) * h)


def chi2_sf(x: float, df: int = 1) -> float:
    return regularized_gamma_q(df / 2, x / 2)


def _as_table(table) -> list[list[int]]:
    if isinstance(table, ConfusionCounts):
        return [[table.tp, table.fn], [table.fp, table.tn]]
    rows = [list(r) for r in table]
    if len(rows) != 2 or any(len(r) != 2 for r in rows):
        raise ValueError("expected a 2x2 table")
    if any(v < 0 for r in rows for v in r):
        raise ValueError("table cells must be non-negative")
    return rows


def _chi_square(table, yates: bool) -> StatResult:
    t = _as_table(table)
    rows = [t[0][0] + t[0][1], t[1][0] + t[1][1]]
    cols = [t[0][0] + t[1][0], t[0][1] + t[1][1]]
    n = rows[0] + rows[1]
    if 0 in rows or 0 in cols:
        raise DegenerateTable("a row or column margin of the table is zero")
    stat = 0.0
    for i in range(2):
        for j in range(2):
            expected = rows[i] * cols[j] / n
            dev = abs(t[i][j] - expected)
            if yates:
                dev = max(0.0, dev - 0.5)
            stat += dev * dev / expected
    return StatResult(stat, chi2_sf(stat, 1), "yates" if yates else "pearson")


def chi_square_yates(table) -> StatResult:
    """Chi-square test of independence on a 2x2 table with Yates continuity correction.

    ``table`` is ``[[a, b], [c, d]]`` or a :class:`ConfusionCounts`, read as
    ``[[tp, fn], [fp, tn]]``.
    """
    return _chi_square(table, True)


def chi_square(table) -> StatResult:
    """Uncorrected Pearson chi-square on a 2x2 table."""
    return _chi_square(table, False)


# -------------------------------------------------------------- agreement

def cohens_kappa(ratings_a: Sequence, ratings_b: Sequence) -> float:
    if len(ratings_a) != len(ratings_b):
        raise LengthMismatch("rating vectors differ in length")
    if not ratings_a:
        raise LengthMismatch("rating vectors are empty")
    n = len(ratings_a)
    p_o = Fraction(sum(x == y for x, y in zip(ratings_a, ratings_b)), n)
    if p_o == 1:
        return 1.0
    ca, cb = Counter(ratings_a), Counter(ratings_b)
    p_e = sum(Fraction(ca[k] * cb[k], n * n) for k in ca)
    return float((p_o - p_e) / (1 - p_e))


def precision_recall(c: ConfusionCounts) -> PrecisionRecall:
    """Precision and recall; an empty denominator yields 0 with the ``*_defined`` flag cleared."""
    pd = c.tp + c.fp
    rd = c.tp + c.fn
    return PrecisionRecall(
        c.tp / pd if pd else 0.0,
        c.tp / rd if rd else 0.0,
        pd > 0,
        rd > 0,
    )
