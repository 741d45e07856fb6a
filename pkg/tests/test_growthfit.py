import math

import numpy as np
import pytest

from substrace.errors import InsufficientData, InvalidInitial, InvalidTime, ShapeError
from substrace.growthfit import (
    GrowthCurve,
    ModelKind,
    bass_curve,
    fit,
    gompertz_curve,
    ms_curve,
    r_squared,
)
from substrace.levmar import levenberg_marquardt

# fitted parameters reported for the three reference collections
BAYC_BASS = dict(p=0.0006274850921316063, q=0.0035935532284403974, m=5_400_999.719294338)
BAYC_GOMPERTZ = dict(A=6319.20952, B=1.38015309, C=0.0173100152)
WOW_MS = dict(h=2234.42649, eta=0.152586865)
COOLCATS_BASS = dict(p=0.0007204043831322507, q=0.003143021198831124, m=4_826_322.792011898)
COOLCATS_MS = dict(h=2057.87671, eta=0.169171113)

DAYS_365 = np.arange(1.0, 366.0)


def euler_oracle(p, q, m, i0, t_grid, dt=0.001):
    """Fine-step forward-Euler integration, independent of the RK4 path."""
    out = np.empty(len(t_grid))
    y = i0
    out[0] = y
    t = t_grid[0]
    for k in range(1, len(t_grid)):
        span = t_grid[k] - t
        steps = int(round(span / dt))
        for _ in range(steps):
            y += dt * (p + q * y / m) * (m - y)
        t = t_grid[k]
        out[k] = y
    return out


class TestBassCurve:
    def test_equilibrium(self):
        c = bass_curve(0.01, 0.1, 500.0, 500.0, np.arange(0.0, 20.0))
        assert np.allclose(c.I, 500.0, atol=1e-9)

    def test_initial_slope(self):
        p, m = 0.004, 2000.0
        c = bass_curve(p, 0.05, m, 0.0, np.array([0.0, 0.01]))
        assert (c.I[1] - c.I[0]) / 0.01 == pytest.approx(p * m, rel=1e-3)

    def test_bayc_params_match_fine_euler_oracle(self):
        t = DAYS_365[::10]  # oracle is slow; sample the grid
        got = bass_curve(BAYC_BASS["p"], BAYC_BASS["q"], BAYC_BASS["m"], 0.0, t).I
        expect = euler_oracle(BAYC_BASS["p"], BAYC_BASS["q"], BAYC_BASS["m"], 0.0, t)
        rel = np.abs(got - expect) / np.maximum(expect, 1.0)
        assert rel.max() < 1e-3

    def test_monotone_and_bounded(self):
        c = bass_curve(0.002, 0.08, 1e5, 0.0, np.arange(0.0, 300.0))
        assert np.all(np.diff(c.I) >= 0)
        assert np.all(c.I <= 1e5)

    def test_bad_initial_rejected(self):
        with pytest.raises(InvalidInitial):
            bass_curve(0.01, 0.1, 100.0, 200.0, np.arange(0.0, 5.0))

    def test_step_halving_stability(self):
        a = bass_curve(*(BAYC_BASS[k] for k in ("p", "q", "m")), 0.0, DAYS_365).I
        from substrace.kernels import bass_rk4
        b = bass_rk4(BAYC_BASS["p"], BAYC_BASS["q"], BAYC_BASS["m"], 0.0, DAYS_365, 0.05)
        rel = np.abs(a - b) / np.maximum(np.abs(b), 1.0)
        assert rel.max() < 1e-6


class TestMsCurve:
    def test_value_at_one(self):
        for eta in (0.0, 0.5, 2.0):
            assert ms_curve(7.5, eta, [1.0]).I[0] == pytest.approx(7.5)

    def test_eta_zero_constant(self):
        c = ms_curve(3.0, 0.0, np.arange(1.0, 50.0))
        assert np.allclose(c.I, 3.0)

    def test_wow_params_match_log_oracle(self):
        c = ms_curve(WOW_MS["h"], WOW_MS["eta"], np.array([1.0, 100.0]))
        assert c.I[0] == pytest.approx(2234.42649)
        log_val = math.exp(math.log(WOW_MS["h"]) + WOW_MS["eta"] * math.log(100.0))
        assert c.I[1] == pytest.approx(log_val, rel=1e-12)

    def test_non_positive_time_rejected(self):
        with pytest.raises(InvalidTime):
            ms_curve(1.0, 0.5, [0.0, 1.0])


class TestGompertzCurve:
    def test_value_at_zero(self):
        c = gompertz_curve(100.0, 2.0, 0.5, [0.0])
        assert c.I[0] == pytest.approx(100.0 * math.exp(-2.0))

    def test_asymptote(self):
        c = gompertz_curve(100.0, 5.0, 1.0, [40.0, 80.0])
        assert c.I[-1] == pytest.approx(100.0, rel=1e-9)

    def test_bayc_point_against_mpmath(self):
        import mpmath
        a, b, cc = BAYC_GOMPERTZ["A"], BAYC_GOMPERTZ["B"], BAYC_GOMPERTZ["C"]
        got = gompertz_curve(a, b, cc, [200.0]).I[0]
        with mpmath.workdps(50):
            expect = mpmath.mpf(a) * mpmath.exp(-mpmath.mpf(b) * mpmath.exp(-mpmath.mpf(cc) * 200))
        assert got == pytest.approx(float(expect), rel=1e-12)

    def test_monotone_bounded(self):
        c = gompertz_curve(50.0, 3.0, 0.1, np.arange(0.0, 100.0))
        assert np.all(np.diff(c.I) >= 0)
        assert np.all(c.I <= 50.0)


class TestRSquared:
    def test_perfect_fit(self):
        assert r_squared([1, 2, 3], [1, 2, 3]).value == 1.0

    def test_mean_predictor_zero(self):
        obs = [1.0, 2.0, 3.0, 6.0]
        mean = sum(obs) / 4
        assert r_squared(obs, [mean] * 4).value == pytest.approx(0.0)

    def test_degenerate_flat_observations(self):
        r = r_squared([2, 2, 2], [2, 2, 2])
        assert r.value == 1.0 and r.degenerate
        r = r_squared([2, 2, 2], [2, 2, 3])
        assert r.value == -math.inf and r.degenerate

    def test_matches_direct_formula(self):
        rng = np.random.default_rng(1)
        obs = rng.uniform(0, 10, 10)
        pred = rng.uniform(0, 10, 10)
        expect = 1 - ((obs - pred) ** 2).sum() / ((obs - obs.mean()) ** 2).sum()
        assert r_squared(obs, pred).value == pytest.approx(expect, abs=1e-12)

    def test_shape_error(self):
        with pytest.raises(ShapeError):
            r_squared([1, 2], [1, 2, 3])


class TestLevmar:
    def test_recovers_linear_system(self):
        A = np.array([[2.0, 1.0], [1.0, 3.0], [0.5, -1.0]])
        target = np.array([1.0, -2.0])
        b = A @ target

        result = levenberg_marquardt(lambda x: A @ x - b, lambda x: A, np.zeros(2))
        assert np.allclose(result.x, target, atol=1e-8)
        assert result.converged

    def test_rosenbrock_valley(self):
        def res(x):
            return np.array([10 * (x[1] - x[0] ** 2), 1 - x[0]])

        def jac(x):
            return np.array([[-20 * x[0], 10.0], [-1.0, 0.0]])

        result = levenberg_marquardt(res, jac, np.array([-1.2, 1.0]), max_iter=200)
        assert np.allclose(result.x, [1.0, 1.0], atol=1e-6)


class TestFit:
    def test_gompertz_recovery_bayc(self):
        curve = gompertz_curve(BAYC_GOMPERTZ["A"], BAYC_GOMPERTZ["B"], BAYC_GOMPERTZ["C"], DAYS_365)
        result = fit(curve, ModelKind.GOMPERTZ, seed=1)
        for name, true in BAYC_GOMPERTZ.items():
            assert abs(result.params[name] - true) / true < 0.02, name
        assert result.r_squared >= 0.999

    def test_ms_recovery_cool_cats(self):
        curve = ms_curve(COOLCATS_MS["h"], COOLCATS_MS["eta"], DAYS_365)
        result = fit(curve, ModelKind.MS, seed=1)
        assert abs(result.params["h"] - COOLCATS_MS["h"]) / COOLCATS_MS["h"] < 0.01
        assert abs(result.params["eta"] - COOLCATS_MS["eta"]) / COOLCATS_MS["eta"] < 0.01
        assert result.r_squared >= 0.999

    def test_bass_curve_agreement_wow(self):
        curve = bass_curve(WOW_BASS["p"], WOW_BASS["q"], WOW_BASS["m"], 0.0, DAYS_365)
        result = fit(curve, ModelKind.BASS, seed=1)
        assert result.r_squared >= 0.999

    def test_fit_deterministic(self):
        curve = ms_curve(100.0, 0.4, np.arange(1.0, 80.0))
        a = fit(curve, ModelKind.MS, seed=9)
        b = fit(curve, ModelKind.MS, seed=9)
        assert a == b

    def test_flat_curve_not_identifiable_for_saturating_models(self):
        flat = GrowthCurve(np.arange(1.0, 10.0), np.full(9, 5.0))
        result = fit(flat, ModelKind.GOMPERTZ, seed=0)
        assert not result.converged
        result = fit(flat, ModelKind.BASS, seed=0)
        assert not result.converged

    def test_too_few_points(self):
        with pytest.raises(InsufficientData):
            fit(GrowthCurve(np.array([1.0, 2.0, 3.0]), np.array([1.0, 2.0, 3.0])),
                ModelKind.MS)

    def test_noisy_ms_recovery_close(self):
        rng = np.random.default_rng(3)
        t = np.arange(1.0, 200.0)
        clean = 50.0 * t ** 0.3
        noisy = np.maximum(clean + rng.normal(0, 0.5, len(t)), 0.0)
        result = fit(GrowthCurve(t, noisy), ModelKind.MS, seed=3)
        assert abs(result.params["eta"] - 0.3) < 0.02
        assert result.r_squared > 0.99

    def test_residual_not_worse_than_any_start(self):
        # multi-start keeps the best; cost must not exceed the plain
        # heuristic start's converged cost
        curve = gompertz_curve(500.0, 2.0, 0.05, np.arange(1.0, 120.0))
        result = fit(curve, ModelKind.GOMPERTZ, seed=11)
        assert result.r_squared >= 0.999999


WOW_BASS = dict(p=0.0007243552683110068, q=0.00293585397760822, m=4_912_992.63549968)
