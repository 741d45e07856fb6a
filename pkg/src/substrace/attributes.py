"""Window-scoped project attributes feeding propensity and clustering.

Each registered attribute maps to one scalar per project for the selected
window. The registry is plain data: adding an attribute is one function plus
one dict entry. All raw columns are min-max normalized across the project
scope before use, so every attribute vector lives in [0, 1]^k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ProjectId, TimeWindow, minmax_normalize
from .dataset import Dataset
from .errors import NoAttributes, UnknownAttribute
from .ingest.stats import DEFAULT_POPULARITY_WEIGHTS


@dataclass(frozen=True)
class AttributeVector:
    project: ProjectId
    values: tuple[float, ...]
    attribute_names: tuple[str, ...]


class _WindowContext:
    """Caches the per-window series the attribute functions share."""

    def __init__(self, dataset: Dataset, d0: int, d1: int, idx: np.ndarray):
        self.dataset = dataset
        self.d0 = d0
        self.d1 = d1
        self.idx = idx
        lo, hi = max(d0, 0), min(d1, dataset.end_day)
        self._lo, self._hi = lo, hi
        self.n_days = d1 - d0 + 1

    def stat_slice(self, panel):
        if self._lo > self._hi:
            return np.full((len(self.idx), 0), np.nan)
        return panel[self.idx, self._lo:self._hi + 1]

    def nanmean(self, panel):
        block = self.stat_slice(panel)
        with np.errstate(invalid="ignore"):
            out = np.nanmean(block, axis=1) if block.shape[1] else np.full(len(self.idx), np.nan)
        return np.nan_to_num(out, nan=0.0)

    def nanstd(self, panel):
        block = self.stat_slice(panel)
        with np.errstate(invalid="ignore"):
            out = np.nanstd(block, axis=1) if block.shape[1] else np.full(len(self.idx), np.nan)
        return np.nan_to_num(out, nan=0.0)

    def holder_series(self, i):
        return self.dataset.holder_count_series(i, self.d0, self.d1)

    def role_counts(self):
        sellers = np.zeros((len(self.idx), self.n_days))
        buyers = np.zeros((len(self.idx), self.n_days))
        for row, i in enumerate(self.idx):
            rp = self.dataset.role_project(int(i))
            if rp is None:
                continue
            s, b = self.dataset.role.daily_role_counts(rp, self.d0, self.d1)
            sellers[row] = s
            buyers[row] = b
        return sellers, buyers


def _floor_price_mean(ctx):
    return ctx.nanmean(ctx.dataset.floor_price)


def _sales_volume_mean(ctx):
    return ctx.nanmean(ctx.dataset.sales_volume)


def _holder_count_mean(ctx):
    return np.array([ctx.holder_series(int(i)).mean() for i in ctx.idx])


def _seller_count_mean(ctx):
    return ctx.role_counts()[0].mean(axis=1)


def _buyer_count_mean(ctx):
    return ctx.role_counts()[1].mean(axis=1)


def _whale_count_mean(ctx):
    return ctx.nanmean(ctx.dataset.whale_count)


def _transfer_count_mean(ctx):
    out = np.zeros(len(ctx.idx))
    for row, i in enumerate(ctx.idx):
        rp = ctx.dataset.role_project(int(i))
        if rp is not None:
            out[row] = ctx.dataset.role.transfer_count(rp, ctx.d0, ctx.d1) / ctx.n_days
    return out


def _popularity_mean(ctx):
    panel = ctx.dataset.popularity_panel(ctx.d0, ctx.d1, DEFAULT_POPULARITY_WEIGHTS)
    return panel[ctx.idx].mean(axis=1)


def _sentiment_mean(ctx):
    return ctx.nanmean(ctx.dataset.sentiment)


def _days_since_launch(ctx):
    return np.maximum(ctx.d1 - ctx.dataset.launch_day[ctx.idx] + 1, 1).astype(np.float64)


def _holder_growth_rate(ctx):
    out = np.zeros(len(ctx.idx))
    for row, i in enumerate(ctx.idx):
        series = ctx.holder_series(int(i))
        out[row] = (series[-1] - series[0]) / ctx.n_days
    return out


def _sales_volatility(ctx):
    return ctx.nanstd(ctx.dataset.sales_volume)


ATTRIBUTE_REGISTRY = {
    "floor_price_mean": _floor_price_mean,
    "sales_volume_mean": _sales_volume_mean,
    "holder_count_mean": _holder_count_mean,
    "seller_count_mean": _seller_count_mean,
    "buyer_count_mean": _buyer_count_mean,
    "whale_count_mean": _whale_count_mean,
    "transfer_count_mean": _transfer_count_mean,
    "popularity_mean": _popularity_mean,
    "sentiment_mean": _sentiment_mean,
    "days_since_launch": _days_since_launch,
    "holder_growth_rate": _holder_growth_rate,
    "sales_volatility": _sales_volatility,
}

DEFAULT_ATTRIBUTES = tuple(ATTRIBUTE_REGISTRY)


def register_attribute(name: str, fn) -> None:
    ATTRIBUTE_REGISTRY[name] = fn


def attribute_matrix(dataset: Dataset, window: TimeWindow, selection,
                     project_ids) -> np.ndarray:
    """(n_projects, n_attributes) matrix, min-max normalized per column.

    A column that is constant across the scope normalizes to 0.5 everywhere,
    which keeps cosine similarity well-defined without favoring an extreme.
    """
    selection = tuple(selection)
    if not selection:
        raise NoAttributes("attribute selection is empty")
    for name in selection:
        if name not in ATTRIBUTE_REGISTRY:
            raise UnknownAttribute(f"unknown attribute {name!r}")
    d0, d1 = dataset.window_range(window)
    idx = np.array([dataset.index_of(pid) for pid in project_ids], dtype=np.int64)
    ctx = _WindowContext(dataset, d0, d1, idx)
    cols = []
    for name in selection:
        raw = np.asarray(ATTRIBUTE_REGISTRY[name](ctx), dtype=np.float64)
        cols.append(minmax_normalize(raw).values if len(raw) else ())
    return np.column_stack([np.asarray(c) for c in cols]) if project_ids else np.zeros((0, len(selection)))


def attribute_vectors(dataset: Dataset, window: TimeWindow, selection,
                      project_ids) -> list[AttributeVector]:
    matrix = attribute_matrix(dataset, window, selection, project_ids)
    names = tuple(selection)
    return [AttributeVector(pid, tuple(map(float, row)), names)
            for pid, row in zip(project_ids, matrix)]
