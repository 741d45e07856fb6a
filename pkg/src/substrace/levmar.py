"""Dense Levenberg-Marquardt with Nielsen gain-ratio damping.

Small and dependency-free on purpose: the growth fits have 2-3 parameters
and need deterministic behavior under multi-start, which is easier to
guarantee with a self-contained solver than with an opaque one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class LMResult:
    x: np.ndarray
    cost: float               # 0.5 * ||r||^2
    iterations: int
    converged: bool


def levenberg_marquardt(residual: Callable[[np.ndarray], np.ndarray],
                        jacobian: Callable[[np.ndarray], np.ndarray],
                        x0,
                        max_iter: int = 100,
                        tau: float = 1e-3,
                        gtol: float = 1e-10,
                        xtol: float = 1e-12,
                        ftol: float = 1e-12) -> LMResult:
    """Minimize 0.5 * ||residual(x)||^2 from x0.

    The damping parameter follows Nielsen's schedule: accepted steps shrink
    it based on the gain ratio, rejected steps double the growth factor.
    """
    x = np.asarray(x0, dtype=np.float64).copy()
    r = np.asarray(residual(x), dtype=np.float64)
    cost = 0.5 * float(r @ r)
    J = np.asarray(jacobian(x), dtype=np.float64)
    A = J.T @ J
    g = J.T @ r
    n = len(x)

    if not np.isfinite(cost):
        return LMResult(x, np.inf, 0, False)

    mu = tau * max(float(A.diagonal().max()), 1e-300)
    nu = 2.0
    converged = float(np.abs(g).max()) < gtol
    it = 0
    while it < max_iter and not converged:
        it += 1
        try:
            delta = np.linalg.solve(A + mu * np.eye(n), -g)
        except np.linalg.LinAlgError:
            mu *= nu
            nu *= 2.0
            continue
        if float(np.linalg.norm(delta)) < xtol * (float(np.linalg.norm(x)) + xtol):
            converged = True
            break
        x_new = x + delta
        r_new = np.asarray(residual(x_new), dtype=np.float64)
        cost_new = 0.5 * float(r_new @ r_new)
        predicted = 0.5 * float(delta @ (mu * delta - g))
        rho = (cost - cost_new) / predicted if predicted > 0 else -1.0
        if np.isfinite(cost_new) and rho > 0:
            if abs(cost - cost_new) <= ftol * max(cost, 1e-300):
                x, r, cost = x_new, r_new, cost_new
                converged = True
                break
            x, r, cost = x_new, r_new, cost_new
            J = np.asarray(jacobian(x), dtype=np.float64)
            A = J.T @ J
            g = J.T @ r
            mu *= max(1.0 / 3.0, 1.0 - (2.0 * rho - 1.0) ** 3)
            nu = 2.0
            if float(np.abs(g).max()) < gtol:
                converged = True
        else:
            mu *= nu
            nu *= 2.0
            if mu > 1e200:
                break
    return LMResult(x, cost, it, converged)
