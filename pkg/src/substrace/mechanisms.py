"""The three substitution mechanisms and their derived quantities.

Per ordered project pair and selected window this module produces:

* recency        R_i   = mean normalized popularity / days since launch
* mutual PA      P_ij  = |S_i ∩ B_j| / H*_i
* global PA      PA_i  = Σ_k P_ki · H_k/H_i − Σ_j P_ij
* propensity     λ_ij  = cosine similarity of attribute vectors (row mean
                         gives the per-project scalar)
* substitution   Π_ij  = λ_ij · P_ij · R_i
* impact         M_i   = Σ_k Π_ki · H_k − Σ_j Π_ij · H_j

Seller/buyer sets aggregate as unions of daily sets over the window, so a
wallet selling early and buying late still counts as migrated. H*_i counts
wallets that ever held i up to the window end; H_i counts distinct holders
within the window. Normalized scores are min-max over the window's scored
project set, so they compare within a window, not across windows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .attributes import attribute_matrix
from .core import ProjectId, TimeWindow, minmax_normalize
from .dataset import Dataset
from .errors import (
    AlignmentError,
    InsufficientProjects,
    InvalidDuration,
    NoAttributes,
    ShapeError,
    UndefinedDenominator,
)
from .ingest.stats import DEFAULT_POPULARITY_WEIGHTS


@dataclass(frozen=True)
class HolderCounts:
    projects: tuple[ProjectId, ...]
    current: np.ndarray      # distinct holders within the window
    cumulative: np.ndarray   # distinct wallets ever holding, up to window end

    def __post_init__(self):
        if len(self.current) != len(self.projects) or len(self.cumulative) != len(self.projects):
            raise AlignmentError("holder count arrays misaligned with project list")
        if np.any(self.cumulative < self.current):
            raise AlignmentError("cumulative holder count below current count")


@dataclass(frozen=True)
class PairMatrix:
    projects: tuple[ProjectId, ...]
    values: np.ndarray

    def __post_init__(self):
        v = self.values
        n = len(self.projects)
        if v.shape != (n, n):
            raise AlignmentError(f"matrix shape {v.shape} does not match {n} projects")
        if np.any(np.diagonal(v) != 0.0):
            raise AlignmentError("pair matrix diagonal must be exactly zero")

    def aligned_with(self, other) -> bool:
        return self.projects == other.projects


@dataclass(frozen=True)
class MechanismScores:
    project: ProjectId
    window: TimeWindow
    recency_raw: float
    recency: float
    global_pa_raw: float
    global_pa: float
    propensity_raw: float
    propensity: float
    impact_raw: float
    impact: float


@dataclass(frozen=True)
class WindowScores:
    """Everything compute_window_scores produces for one window."""

    window: TimeWindow
    projects: tuple[ProjectId, ...]        # scored projects, sorted
    alive: tuple[ProjectId, ...]           # alive projects (scored superset)
    scores: tuple[MechanismScores, ...]
    migrated: np.ndarray                   # |S_i ∩ B_j| counts
    p_matrix: PairMatrix
    lambda_matrix: PairMatrix
    pi_matrix: PairMatrix
    holder_counts: HolderCounts


# --- the individual operations ----------------------------------------------

def recency(avg_popularity: float, days_since_launch: float) -> float:
    """Average popularity over the window divided by days since launch."""
    if days_since_launch < 1:
        raise InvalidDuration(f"days since launch {days_since_launch} below 1")
    return avg_popularity / days_since_launch


def mutual_preferential_attachment(sellers_i, buyers_j, cumulative_holders_i) -> float:
    """Share of project i's historical holders that migrated toward j."""
    if cumulative_holders_i < 1:
        raise UndefinedDenominator("project has no historical holders in window")
    if isinstance(sellers_i, np.ndarray) and isinstance(buyers_j, np.ndarray):
        overlap = len(np.intersect1d(sellers_i, buyers_j, assume_unique=True))
    else:
        overlap = len(set(sellers_i) & set(buyers_j))
    return overlap / cumulative_holders_i


def global_preferential_attachment(P: PairMatrix, holders: HolderCounts) -> np.ndarray:
    """Net expected stakeholder inflow per project, holder-normalized."""
    if P.projects != holders.projects:
        raise AlignmentError("matrix and holder counts cover different projects")
    h = holders.current.astype(np.float64)
    if np.any(h < 1):
        bad = [p for p, c in zip(P.projects, h) if c < 1]
        raise UndefinedDenominator(f"projects without current holders: {bad}")
    v = P.values
    inflow = (v.T @ h) / h        # Σ_k P_ki · H_k / H_i  (diagonal is zero)
    outflow = v.sum(axis=1)       # Σ_j P_ij
    return inflow - outflow


def mutual_propensity(attr_i, attr_j) -> float:
    """Cosine similarity of two non-negative attribute vectors."""
    a = np.asarray(attr_i, dtype=np.float64)
    b = np.asarray(attr_j, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeError(f"attribute vectors differ in shape: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise NoAttributes("attribute vectors are empty")
    na = math.sqrt(float(a @ a))
    nb = math.sqrt(float(b @ b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(a @ b) / (na * nb)


def global_propensity(lam: PairMatrix, project: ProjectId) -> float:
    """Row mean of a project's pairwise propensities."""
    n = len(lam.projects)
    if n < 2:
        raise InsufficientProjects("propensity needs at least two projects")
    i = lam.projects.index(project)
    row = np.delete(lam.values[i], i)
    return float(row.mean())


def mutual_substitution_rate(lam: PairMatrix, P: PairMatrix, R) -> PairMatrix:
    """Π_ij = λ_ij · P_ij · R_i (recency of the source project)."""
    if not lam.aligned_with(P):
        raise AlignmentError("propensity and attachment matrices misaligned")
    r = np.asarray(R, dtype=np.float64)
    if len(r) != len(lam.projects):
        raise AlignmentError("recency vector misaligned with matrices")
    values = lam.values * P.values * r[:, None]
    return PairMatrix(lam.projects, values)


def impact_dynamics(pi: PairMatrix, holders: HolderCounts) -> np.ndarray:
    """M_i = Σ_k Π_ki · H_k − Σ_j Π_ij · H_j."""
    if pi.projects != holders.projects:
        raise AlignmentError("matrix and holder counts cover different projects")
    h = holders.current.astype(np.float64)
    v = pi.values
    return v.T @ h - v @ h


# --- the full window pipeline -------------------------------------------------

def _normalized(values) -> np.ndarray:
    return np.asarray(minmax_normalize(values).values)


def compute_window_scores(dataset: Dataset, window: TimeWindow, attribute_selection,
                          popularity_weights=DEFAULT_POPULARITY_WEIGHTS) -> WindowScores:
    """Run roles → popularity → mechanisms → Π → M → normalization for a window.

    Projects without any historical holder or without a holder inside the
    window carry no usable denominators and are dropped from the matrices.
    Deterministic for a fixed dataset, window, and selection.
    """
    d0, d1 = dataset.window_range(window)
    alive_mask = dataset.alive_mask(d0, d1)
    alive = [p.id for p, m in zip(dataset.projects, alive_mask) if m]
    if len(alive) < 2:
        raise InsufficientProjects(f"{len(alive)} alive projects in window; need 2")

    sellers, buyers = {}, {}
    h_cur, h_cum = {}, {}
    for pid in alive:
        i = dataset.index_of(pid)
        rp = dataset.role_project(i)
        if rp is None:
            sellers[pid] = buyers[pid] = np.empty(0, dtype=np.int64)
            h_cur[pid] = h_cum[pid] = 0
        else:
            sellers[pid] = dataset.role.sellers_union(rp, d0, d1)
            buyers[pid] = dataset.role.buyers_union(rp, d0, d1)
            h_cur[pid] = len(dataset.role.holders_within(rp, d0, d1))
            h_cum[pid] = dataset.role.cumulative_holders(rp, d1)

    scored = tuple(pid for pid in alive if h_cum[pid] >= 1 and h_cur[pid] >= 1)
    if len(scored) < 2:
        raise InsufficientProjects(
            f"{len(scored)} projects with holders in window; need 2")
    n = len(scored)

    holder_counts = HolderCounts(
        projects=scored,
        current=np.array([h_cur[p] for p in scored], dtype=np.int64),
        cumulative=np.array([h_cum[p] for p in scored], dtype=np.int64),
    )

    migrated = np.zeros((n, n), dtype=np.int64)
    p_values = np.zeros((n, n), dtype=np.float64)
    for a, pa in enumerate(scored):
        for b, pb in enumerate(scored):
            if a == b:
                continue
            overlap = len(np.intersect1d(sellers[pa], buyers[pb], assume_unique=True))
            migrated[a, b] = overlap
            p_values[a, b] = overlap / h_cum[pa]
    p_matrix = PairMatrix(scored, p_values)

    # recency over the popularity panel, normalized across the scored set
    idx = np.array([dataset.index_of(p) for p in scored])
    pop = dataset.popularity_panel(d0, d1, popularity_weights)[idx]
    pop_norm = _normalized(pop.ravel()).reshape(pop.shape)
    launch = dataset.launch_day[idx]
    r_raw = np.zeros(n)
    for k in range(n):
        lo = max(d0, int(launch[k]))
        avg = pop_norm[k, lo - d0:].mean() if lo <= d1 else 0.0
        r_raw[k] = recency(float(avg), max(int(d1 - launch[k] + 1), 1))

    attrs = attribute_matrix(dataset, window, attribute_selection, scored)
    lam_values = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            lam_values[a, b] = lam_values[b, a] = mutual_propensity(attrs[a], attrs[b])
    lam = PairMatrix(scored, lam_values)
    prop_raw = lam_values.sum(axis=1) / (n - 1)

    pa_raw = global_preferential_attachment(p_matrix, holder_counts)
    pi_matrix = mutual_substitution_rate(lam, p_matrix, r_raw)
    m_raw = impact_dynamics(pi_matrix, holder_counts)

    r_n = _normalized(r_raw)
    pa_n = _normalized(pa_raw)
    prop_n = _normalized(prop_raw)
    m_n = _normalized(m_raw)

    scores = tuple(
        MechanismScores(
            project=pid, window=window,
            recency_raw=float(r_raw[k]), recency=float(r_n[k]),
            global_pa_raw=float(pa_raw[k]), global_pa=float(pa_n[k]),
            propensity_raw=float(prop_raw[k]), propensity=float(prop_n[k]),
            impact_raw=float(m_raw[k]), impact=float(m_n[k]),
        )
        for k, pid in enumerate(scored)
    )
    return WindowScores(
        window=window, projects=scored, alive=tuple(alive), scores=scores,
        migrated=migrated, p_matrix=p_matrix, lambda_matrix=lam,
        pi_matrix=pi_matrix, holder_counts=holder_counts,
    )


@dataclass(frozen=True)
class DailyPanel:
    """Per-day mechanism series for every scored project in a window.

    Day-level values use that day's seller/buyer sets, end-of-day holder
    counts, and holders-to-date denominators; propensity is window-constant.
    Normalized series are min-max over the whole (project, day) panel per
    metric, so one project's day-to-day shape is preserved.
    """

    window: TimeWindow
    projects: tuple[ProjectId, ...]
    sellers: np.ndarray        # (n, days) distinct daily counts
    buyers: np.ndarray
    holders: np.ndarray        # (n, days) end-of-day counts
    recency_raw: np.ndarray    # (n, days) floats, likewise below
    recency: np.ndarray
    pa_raw: np.ndarray
    pa: np.ndarray
    propensity_raw: np.ndarray
    propensity: np.ndarray
    impact_raw: np.ndarray
    impact: np.ndarray

    def row(self, pid: ProjectId) -> int:
        return self.projects.index(pid)


def compute_daily_panel(dataset: Dataset, window: TimeWindow, attribute_selection,
                        popularity_weights=DEFAULT_POPULARITY_WEIGHTS) -> DailyPanel:
    """Day-resolved companion of compute_window_scores for the same window."""
    scores = compute_window_scores(dataset, window, attribute_selection,
                                   popularity_weights)
    scored = scores.projects
    lam = scores.lambda_matrix.values
    n = len(scored)
    d0, d1 = dataset.window_range(window)
    days = d1 - d0 + 1
    idx = np.array([dataset.index_of(p) for p in scored])
    launch = dataset.launch_day[idx]

    pop = dataset.popularity_panel(d0, d1, popularity_weights)[idx]
    pop_norm = _normalized(pop.ravel()).reshape(pop.shape)

    sellers_c = np.zeros((n, days), dtype=np.int64)
    buyers_c = np.zeros((n, days), dtype=np.int64)
    holders_c = np.zeros((n, days), dtype=np.int64)
    day_sets: list[list[tuple[np.ndarray, np.ndarray]]] = []
    h_cum = np.zeros((n, days), dtype=np.int64)
    for k in range(n):
        rp = dataset.role_project(int(idx[k]))
        if rp is None:
            day_sets.append([(np.empty(0, np.int64), np.empty(0, np.int64))] * days)
            continue
        s_c, b_c = dataset.role.daily_role_counts(rp, d0, d1)
        sellers_c[k] = s_c
        buyers_c[k] = b_c
        holders_c[k] = dataset.role.holder_count_series(rp, d0, d1)
        day_sets.append([dataset.role.daily_role_sets(rp, d0 + off) for off in range(days)])
        h_cum[k] = np.array([dataset.role.cumulative_holders(rp, d0 + off)
                             for off in range(days)])

    r_raw = np.zeros((n, days))
    pa_raw = np.zeros((n, days))
    m_raw = np.zeros((n, days))
    for off in range(days):
        d = d0 + off
        p_day = np.zeros((n, n))
        for a in range(n):
            if h_cum[a, off] < 1:
                continue
            s_a = day_sets[a][off][0]
            if not len(s_a):
                continue
            for b in range(n):
                if a == b:
                    continue
                b_b = day_sets[b][off][1]
                if len(b_b):
                    p_day[a, b] = len(np.intersect1d(s_a, b_b, assume_unique=True)) / h_cum[a, off]
        h = holders_c[:, off].astype(np.float64)
        safe_h = np.where(h > 0, h, 1.0)
        pa_raw[:, off] = np.where(h > 0, (p_day.T @ h) / safe_h - p_day.sum(axis=1), 0.0)
        for k in range(n):
            if d < launch[k]:
                continue
            lo = max(d0, int(launch[k]))
            r_raw[k, off] = pop_norm[k, lo - d0:off + 1].mean() / (d - launch[k] + 1)
        pi_day = lam * p_day * r_raw[:, off][:, None]
        m_raw[:, off] = pi_day.T @ h - pi_day @ h

    prop_raw = np.repeat(
        (lam.sum(axis=1) / (n - 1))[:, None], days, axis=1)

    def norm(panel):
        return _normalized(panel.ravel()).reshape(panel.shape)

    return DailyPanel(
        window=window, projects=scored,
        sellers=sellers_c, buyers=buyers_c, holders=holders_c,
        recency_raw=r_raw, recency=norm(r_raw),
        pa_raw=pa_raw, pa=norm(pa_raw),
        propensity_raw=prop_raw, propensity=norm(prop_raw),
        impact_raw=m_raw, impact=norm(m_raw),
    )
