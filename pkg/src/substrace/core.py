"""Shared domain types and the min-max normalization every score passes through.

All time handling is UTC calendar days; identifiers are lowercase text. The
types here are immutable value objects and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import date

from .errors import EmptyInput, InvalidValue, InvalidWindow

# Mint/burn marker in transfer logs. Never counted as holder, seller, or buyer.
ZERO_ADDRESS = "0x0000000000000000000000000000000000000000"

ProjectId = str
WalletAddress = str


def normalize_id(value: str) -> str:
    """Case-normalize an address-like identifier (dedupes mixed-case input)."""
    v = value.strip().lower()
    if not v:
        raise InvalidValue("empty identifier")
    return v


@dataclass(frozen=True)
class Project:
    id: ProjectId
    name: str
    twitter_hashtag: str
    launch_date: date


@dataclass(frozen=True)
class TimeWindow:
    """Inclusive UTC calendar-day range."""

    start: date
    end: date

    def __post_init__(self):
        if self.start > self.end:
            raise InvalidWindow(f"window start {self.start} after end {self.end}")

    @property
    def days(self) -> int:
        return (self.end - self.start).days + 1


def window_days(w: TimeWindow) -> int:
    """Inclusive day count of the window."""
    return w.days


@dataclass(frozen=True)
class NormalizedSeries:
    """Min-max rescaled series with the raw extrema kept for inverse mapping."""

    values: tuple[float, ...]
    raw_min: float
    raw_max: float

    def denormalize(self) -> list[float]:
        span = self.raw_max - self.raw_min
        if span == 0.0:
            return [self.raw_min] * len(self.values)
        return [self.raw_min + v * span for v in self.values]


def minmax_normalize(series) -> NormalizedSeries:
    """Rescale a series to [0, 1].

    A constant series maps every entry to 0.5 so downstream products stay
    finite without privileging either extreme.
    """
    vals = [float(v) for v in series]
    if not vals:
        raise EmptyInput("cannot normalize an empty series")
    for v in vals:
        if not math.isfinite(v):
            raise InvalidValue(f"non-finite entry {v!r}")
    lo, hi = min(vals), max(vals)
    if lo == hi:
        return NormalizedSeries(tuple(0.5 for _ in vals), lo, hi)
    span = hi - lo
    return NormalizedSeries(tuple((v - lo) / span for v in vals), lo, hi)
