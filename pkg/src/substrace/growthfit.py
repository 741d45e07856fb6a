"""Growth curves and their least-squares fits.

Three model families describe cumulative holder evolution:

* Bass diffusion      dI/dt = (p + q I/m)(m - I), integrated with RK4
* power-law growth    I(t) = h * t^eta
* Gompertz            I(t) = A * exp(-B * exp(-C t))

Fits run Levenberg-Marquardt from five data-derived starts (jittered under
the caller's seed) with parameters kept positive through a log
reparameterization. The Bass Jacobian is central-difference (the model is
ODE-defined); the other two use analytic Jacobians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import (
    InsufficientData,
    InvalidInitial,
    InvalidTime,
    InvalidValue,
    ShapeError,
)
from .levmar import levenberg_marquardt

MIN_FIT_POINTS = 4
N_STARTS = 5
RK_MAX_STEP = 0.1


class ModelKind(str, Enum):
    BASS = "bass"
    MS = "ms"
    GOMPERTZ = "gompertz"


PARAM_NAMES = {
    ModelKind.BASS: ("p", "q", "m"),
    ModelKind.MS: ("h", "eta"),
    ModelKind.GOMPERTZ: ("A", "B", "C"),
}


@dataclass(frozen=True)
class GrowthCurve:
    t: np.ndarray
    I: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=np.float64)
        I = np.asarray(self.I, dtype=np.float64)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "I", I)
        if t.shape != I.shape or t.ndim != 1:
            raise ShapeError(f"t and I must be 1-d and equal length, got {t.shape} vs {I.shape}")
        if len(t) and np.any(np.diff(t) <= 0):
            raise InvalidTime("t must be strictly increasing")
        if np.any(I < 0):
            raise InvalidValue("cumulative counts cannot be negative")

    def __len__(self):
        return len(self.t)


@dataclass(frozen=True)
class GrowthFit:
    model: ModelKind
    params: dict[str, float]
    r_squared: float
    converged: bool
    iterations: int
    i0: float = 0.0            # Bass initial condition (first observed value)

    def curve(self, t_grid) -> GrowthCurve:
        p = self.params
        if self.model is ModelKind.BASS:
            return bass_curve(p["p"], p["q"], p["m"], self.i0, t_grid)
        if self.model is ModelKind.MS:
            return ms_curve(p["h"], p["eta"], t_grid)
        return gompertz_curve(p["A"], p["B"], p["C"], t_grid)


# --- forward models -----------------------------------------------------------

def bass_curve(p: float, q: float, m: float, i0: float, t_grid) -> GrowthCurve:
    """Integrate the Bass ODE over t_grid (RK4, step <= 0.1 day)."""
    if p < 0 or q < 0:
        raise InvalidValue(f"p and q must be non-negative, got p={p} q={q}")
    if m <= 0:
        raise InvalidValue(f"market size m={m} must be positive")
    if not 0 <= i0 <= m:
        raise InvalidInitial(f"initial adopters {i0} outside [0, {m}]")
    t = np.asarray(t_grid, dtype=np.float64)
    return GrowthCurve(t, kernels.bass_rk4(p, q, m, i0, t, RK_MAX_STEP))


def ms_curve(h: float, eta: float, t_grid) -> GrowthCurve:
    """Power-law growth h * t^eta, defined for positive times."""
    if h < 0:
        raise InvalidValue(f"h={h} must be non-negative")
    t = np.asarray(t_grid, dtype=np.float64)
    if np.any(t <= 0):
        raise InvalidTime("power-law growth needs strictly positive times")
    return GrowthCurve(t, h * np.power(t, eta))


def gompertz_curve(a: float, b: float, c: float, t_grid) -> GrowthCurve:
    """Gompertz saturation curve A * exp(-B * exp(-C t))."""
    if a <= 0:
        raise InvalidValue(f"asymptote A={a} must be positive")
    if b < 0 or c < 0:
        raise InvalidValue(f"B and C must be non-negative, got B={b} C={c}")
    t = np.asarray(t_grid, dtype=np.float64)
    return GrowthCurve(t, a * np.exp(-b * np.exp(-c * t)))


# --- goodness of fit ------------------------------------------------------------

class RSquared(NamedTuple):
    value: float
    degenerate: bool = False

    def __float__(self):
        return self.value


def r_squared(observed, predicted) -> RSquared:
    """1 - SS_res/SS_tot; a flat observation series is flagged degenerate."""
    obs = np.asarray(observed, dtype=np.float64)
    pred = np.asarray(predicted, dtype=np.float64)
    if obs.shape != pred.shape:
        raise ShapeError(f"length mismatch {obs.shape} vs {pred.shape}")
    if len(obs) < 2:
        raise ShapeError("need at least two points")
    ss_res = float(((obs - pred) ** 2).sum())
    ss_tot = float(((obs - obs.mean()) ** 2).sum())
    if ss_tot == 0.0:
        return RSquared(1.0 if ss_res == 0.0 else -math.inf, degenerate=True)
    return RSquared(1.0 - ss_res / ss_tot, degenerate=False)


# --- fitting ---------------------------------------------------------------------

def _heuristic_start(curve: GrowthCurve, model: ModelKind) -> np.ndarray:
    t, I = curve.t, curve.I
    imax = float(I.max())
    if model is ModelKind.MS:
        # log-log least squares gives (h, eta) directly
        y = np.log(np.maximum(I, 1e-12))
        x = np.log(t)
        slope, intercept = np.polyfit(x, y, 1)
        return np.array([max(math.exp(intercept), 1e-9), max(slope, 1e-6)])
    if model is ModelKind.GOMPERTZ:
        a0 = max(imax, 1e-9)
        inner = -np.log(np.clip(I / (a0 * 1.0001), 1e-12, 1 - 1e-12))
        y = np.log(inner)
        slope, intercept = np.polyfit(t, y, 1)
        b0 = max(math.exp(intercept), 1e-9)
        c0 = max(-slope, 1e-6)
        return np.array([a0, b0, c0])
    m0 = max(2.0 * imax, 1e-6)
    dt = t[1] - t[0]
    p0 = max((I[1] - I[0]) / dt / m0, 1e-9)
    q0 = 5.0 * p0
    return np.array([p0, q0, m0])


def _model_residual(model: ModelKind, curve: GrowthCurve):
    t, I = curve.t, curve.I
    if model is ModelKind.BASS:
        i0 = float(I[0])

        def residual(theta):
            p, q, m = np.exp(theta)
            return kernels.bass_rk4(p, q, m, i0, t, RK_MAX_STEP) - I

        def jacobian(theta):
            J = np.empty((len(t), 3))
            for k in range(3):
                step = 1e-6 * max(1.0, abs(theta[k]))
                hi = theta.copy(); hi[k] += step
                lo = theta.copy(); lo[k] -= step
                J[:, k] = (residual(hi) - residual(lo)) / (2.0 * step)
            return J

        return residual, jacobian

    if model is ModelKind.MS:
        log_t = np.log(t)

        def residual(theta):
            h, eta = np.exp(theta)
            return h * np.power(t, eta) - I

        def jacobian(theta):
            h, eta = np.exp(theta)
            model_vals = h * np.power(t, eta)
            return np.column_stack([model_vals, model_vals * log_t * eta])

        return residual, jacobian

    def residual(theta):
        a, b, c = np.exp(theta)
        return a * np.exp(-b * np.exp(-c * t)) - I

    def jacobian(theta):
        a, b, c = np.exp(theta)
        decay = np.exp(-c * t)
        vals = a * np.exp(-b * decay)
        return np.column_stack([
            vals,                      # d/d log A = A * dI/dA = I
            vals * (-b * decay),       # d/d log B
            vals * (b * c * t * decay),  # d/d log C
        ])

    return residual, jacobian


def fit(curve: GrowthCurve, model: ModelKind, init: dict[str, float] | None = None,
        seed: int = 0) -> GrowthFit:
    """Least-squares fit by multi-start Levenberg-Marquardt.

    Five starts: the data heuristic (or the caller's init) plus four
    log-normal jitters of it drawn from the seed. Best final cost wins,
    ties broken by start index. Flat Bass/Gompertz targets are not
    identifiable; the heuristic parameters come back with converged=False.
    """
    model = ModelKind(model)
    names = PARAM_NAMES[model]
    if len(curve) < max(MIN_FIT_POINTS, len(names) + 1):
        raise InsufficientData(f"{len(curve)} points; need at least {MIN_FIT_POINTS}")

    flat = float(curve.I.max() - curve.I.min()) == 0.0
    base = (np.array([init[n] for n in names], dtype=np.float64)
            if init is not None else _heuristic_start(curve, model))
    base = np.maximum(base, 1e-12)

    if flat and model in (ModelKind.BASS, ModelKind.GOMPERTZ):
        params = dict(zip(names, map(float, base)))
        pred = _model_residual(model, curve)[0](np.log(base)) + curve.I
        return GrowthFit(model, params, float(r_squared(curve.I, pred).value),
                         converged=False, iterations=0, i0=float(curve.I[0]))

    residual, jacobian = _model_residual(model, curve)
    rng = np.random.default_rng(seed)
    theta0 = np.log(base)
    starts = [theta0]
    for _ in range(N_STARTS - 1):
        starts.append(theta0 + rng.normal(0.0, 0.3, size=len(theta0)))

    best = None
    best_key = None
    for idx, start in enumerate(starts):
        result = levenberg_marquardt(residual, jacobian, start, max_iter=200)
        key = (result.cost, idx)
        if best_key is None or key < best_key:
            best, best_key = result, key

    values = np.exp(best.x)
    params = dict(zip(names, map(float, values)))
    pred = residual(best.x) + curve.I
    r2 = r_squared(curve.I, pred)
    return GrowthFit(model, params, float(r2.value),
                     converged=best.converged, iterations=best.iterations,
                     i0=float(curve.I[0]))
