"""Per-day derived quantities: role fractions, popularity, correlation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from ..errors import EmptyDay, InvalidWeight, ShapeError
from .replay import DailyRoleRecord

DEFAULT_POPULARITY_WEIGHTS = (1.0, 1.0, 1.0, 1.0)


@dataclass(frozen=True)
class RoleFractions:
    b: float
    s: float
    h: float


def role_fractions(record: DailyRoleRecord) -> RoleFractions:
    """Tripartite stakeholder fractions for one project-day, summing to 1.

    A wallet active in several roles is counted once, with buyer taking
    priority over seller over pure holder; holders count only when not
    trading that day. The raw sets on the record stay untouched.
    """
    buyers = record.buyers
    sellers = record.sellers - buyers
    holders = record.holders - record.buyers - record.sellers
    total = len(buyers) + len(sellers) + len(holders)
    if total == 0:
        raise EmptyDay(f"{record.project} {record.date}: no stakeholders")
    return RoleFractions(len(buyers) / total, len(sellers) / total, len(holders) / total)


def popularity(record, weights=DEFAULT_POPULARITY_WEIGHTS) -> float:
    """Weighted sum of a day's retweet/reply/like/quote counts."""
    if len(weights) != 4:
        raise InvalidWeight(f"expected 4 weights, got {len(weights)}")
    for w in weights:
        if not math.isfinite(w) or w < 0:
            raise InvalidWeight(f"weight {w!r} must be finite and non-negative")
    w_rt, w_rp, w_lk, w_qt = weights
    return (w_rt * record.retweets + w_rp * record.replies
            + w_lk * record.likes + w_qt * record.quotes)


class CorrResult(NamedTuple):
    value: float
    degenerate: bool = False

    def __float__(self):
        return self.value


def pearson_correlation(x, y) -> CorrResult:
    """Sample Pearson coefficient; zero-variance input flags degenerate."""
    if len(x) != len(y):
        raise ShapeError(f"length mismatch {len(x)} vs {len(y)}")
    n = len(x)
    if n < 2:
        raise ShapeError("need at least two points")
    mx = sum(x) / n
    my = sum(y) / n
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    if sxx == 0.0 or syy == 0.0:
        return CorrResult(0.0, degenerate=True)
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    return CorrResult(sxy / math.sqrt(sxx * syy), degenerate=False)


def _average_ranks(values) -> list[float]:
    n = len(values)
    order = sorted(range(n), key=lambda i: values[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def spearman_correlation(x, y) -> CorrResult:
    """Rank correlation: Pearson over average-tied ranks."""
    if len(x) != len(y):
        raise ShapeError(f"length mismatch {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise ShapeError("need at least two points")
    return pearson_correlation(_average_ranks(list(x)), _average_ranks(list(y)))
