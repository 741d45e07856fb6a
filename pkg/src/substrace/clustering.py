"""Project grouping: seeded k-means++ / Lloyd and diagonal-covariance EM.

Both methods are deterministic for a fixed (vectors, k, seed): the input is
canonicalized by project id before any randomness, so permuting the caller's
vector order cannot change an assignment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .attributes import AttributeVector
from .core import ProjectId
from .errors import InvalidK, NumericalFailure, TooManyClusters


class Method(str, Enum):
    KMEANS = "kmeans"
    GMM = "gmm"


@dataclass(frozen=True)
class ClusterResult:
    method: Method
    k: int
    assignments: dict[ProjectId, int]
    centroids: np.ndarray          # (k, d)
    group_order: tuple[int, ...]   # groups by size descending
    seed: int
    iterations_run: int
    converged: bool

    def members(self, group: int) -> list[ProjectId]:
        return sorted(p for p, g in self.assignments.items() if g == group)

    def sizes(self) -> list[int]:
        counts = [0] * self.k
        for g in self.assignments.values():
            counts[g] += 1
        return counts


def order_groups(assignments: dict[ProjectId, int], k: int | None = None) -> tuple[int, ...]:
    """Groups sorted by member count descending; ties by smallest member id."""
    if not assignments:
        raise InvalidK("no assignments to order")
    if k is None:
        k = max(assignments.values()) + 1
    members: dict[int, list[ProjectId]] = {g: [] for g in range(k)}
    for pid, g in assignments.items():
        members[g].append(pid)
    sentinel = "\U0010ffff"

    def key(g):
        ms = members[g]
        return (-len(ms), min(ms) if ms else sentinel, g)

    return tuple(sorted(range(k), key=key))


def _canonical(vectors: list[AttributeVector]):
    ordered = sorted(vectors, key=lambda v: v.project)
    X = np.array([v.values for v in ordered], dtype=np.float64)
    pids = [v.project for v in ordered]
    return pids, X


def _validate(n: int, k: int, max_iter: int, tol: float):
    if k < 1:
        raise InvalidK(f"k={k} must be at least 1")
    if k > n:
        raise TooManyClusters(f"k={k} exceeds {n} projects")
    if max_iter < 1:
        raise InvalidK(f"max_iter={max_iter} must be at least 1")
    if tol <= 0:
        raise InvalidK(f"tol={tol} must be positive")


def _kmeans_pp_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(X)
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    d2 = ((X - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0:
            idx = int(rng.integers(n))  # all points coincide with a center
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centers[j] = X[idx]
        d2 = np.minimum(d2, ((X - centers[j]) ** 2).sum(axis=1))
    return centers


def _assign(X, centers):
    d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    return d2.argmin(axis=1), d2


def kmeans(vectors: list[AttributeVector], k: int, seed: int = 0,
           max_iter: int = 300, tol: float = 1e-7) -> ClusterResult:
    """Lloyd's algorithm with k-means++ seeding.

    Empty clusters are re-seeded from the point farthest from its assigned
    center. Convergence means the largest centroid shift fell below tol.
    """
    pids, X = _canonical(vectors)
    n = len(pids)
    _validate(n, k, max_iter, tol)
    rng = np.random.default_rng(seed)
    centers = _kmeans_pp_init(X, k, rng)

    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        labels, d2 = _assign(X, centers)
        point_cost = d2[np.arange(n), labels]
        for g in range(k):
            if not np.any(labels == g):
                far = int(point_cost.argmax())
                centers[g] = X[far]
                labels[far] = g
                point_cost[far] = 0.0
        new_centers = centers.copy()
        for g in range(k):
            mask = labels == g
            if mask.any():
                new_centers[g] = X[mask].mean(axis=0)
        shift = np.sqrt(((new_centers - centers) ** 2).sum(axis=1)).max()
        centers = new_centers
        if shift < tol:
            converged = True
            break
    labels, _ = _assign(X, centers)

    assignments = {pid: int(g) for pid, g in zip(pids, labels)}
    return ClusterResult(
        method=Method.KMEANS, k=k, assignments=assignments, centroids=centers,
        group_order=order_groups(assignments, k), seed=seed,
        iterations_run=iterations, converged=converged,
    )


def kmeans_objective(vectors: list[AttributeVector], result: ClusterResult) -> float:
    """Within-cluster sum of squares of a clustering."""
    total = 0.0
    for v in vectors:
        c = result.centroids[result.assignments[v.project]]
        total += float(((np.asarray(v.values) - c) ** 2).sum())
    return total


def _log_gaussian_diag(X, mean, var):
    # sum over dims of log N(x_d | mu_d, var_d)
    return -0.5 * (np.log(2.0 * math.pi * var).sum()
                   + ((X - mean) ** 2 / var).sum(axis=1))


def _em_loop(pids, X, k, seed, max_iter, tol, floor, vectors):
    n, d = X.shape
    km = kmeans(vectors, k, seed=seed, max_iter=max_iter, tol=tol)
    means = km.centroids.copy()
    weights = np.full(k, 1.0 / k)
    variances = np.full((k, d), floor)
    labels0 = np.array([km.assignments[p] for p in pids])
    for g in range(k):
        mask = labels0 == g
        if mask.any():
            weights[g] = mask.sum() / n
            variances[g] = np.maximum(X[mask].var(axis=0), floor)
    weights /= weights.sum()

    log_resp = np.zeros((n, k))
    trace: list[float] = []
    prev_ll = -np.inf
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        for g in range(k):
            log_resp[:, g] = np.log(weights[g]) + _log_gaussian_diag(X, means[g], variances[g])
        norm = np.logaddexp.reduce(log_resp, axis=1)
        ll = float(norm.sum())
        if not math.isfinite(ll):
            raise NumericalFailure("log-likelihood is not finite", iteration=iterations)
        trace.append(ll)
        resp = np.exp(log_resp - norm[:, None])

        nk = resp.sum(axis=0)
        weights = nk / n
        means = (resp.T @ X) / nk[:, None]
        for g in range(k):
            diff = X - means[g]
            variances[g] = np.maximum((resp[:, g][:, None] * diff ** 2).sum(axis=0) / nk[g],
                                      floor)
        if iterations > 1 and ll - prev_ll < tol:
            converged = True
            break
        prev_ll = ll

    for g in range(k):
        log_resp[:, g] = np.log(weights[g]) + _log_gaussian_diag(X, means[g], variances[g])
    labels = log_resp.argmax(axis=1)
    return means, labels, iterations, converged, trace


def gmm(vectors: list[AttributeVector], k: int, seed: int = 0,
        max_iter: int = 300, tol: float = 1e-7,
        covariance_floor: float = 1e-6) -> ClusterResult:
    """EM for a diagonal-covariance Gaussian mixture, seeded from k-means.

    Assignments are argmax responsibility. The log-likelihood is
    non-decreasing across iterations up to the covariance floor.
    """
    if covariance_floor <= 0:
        raise InvalidK(f"covariance_floor={covariance_floor} must be positive")
    pids, X = _canonical(vectors)
    _validate(len(pids), k, max_iter, tol)
    means, labels, iterations, converged, _ = _em_loop(
        pids, X, k, seed, max_iter, tol, covariance_floor, vectors)
    assignments = {pid: int(g) for pid, g in zip(pids, labels)}
    return ClusterResult(
        method=Method.GMM, k=k, assignments=assignments, centroids=means,
        group_order=order_groups(assignments, k), seed=seed,
        iterations_run=iterations, converged=converged,
    )


def gmm_log_likelihood_trace(vectors: list[AttributeVector], k: int, seed: int = 0,
                             max_iter: int = 300, tol: float = 1e-7,
                             covariance_floor: float = 1e-6) -> list[float]:
    """Per-iteration log-likelihoods of the exact EM run gmm() executes."""
    pids, X = _canonical(vectors)
    _validate(len(pids), k, max_iter, tol)
    return _em_loop(pids, X, k, seed, max_iter, tol, covariance_floor, vectors)[4]
