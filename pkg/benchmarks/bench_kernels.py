#!/usr/bin/env python3
"""Compare the compiled kernels against the pure-Python fallback.

Run from the repository root:

    python benchmarks/bench_kernels.py

The replay benchmark encodes a synthetic transfer log once and times only the
kernel call; the Bass benchmark times single 365-day integrations at the
production step size and a full three-parameter fit.
"""

import time

import numpy as np

from substrace.kernels import _pure

try:
    from substrace.kernels import _core
except ImportError:
    _core = None


def timeit(fn, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_replay(n_events=500_000, n_accounts=60_000, n_tokens=120_000, n_days=550):
    rng = np.random.default_rng(0)
    day = np.sort(rng.integers(0, n_days, n_events)).astype(np.int32)
    tok = rng.integers(0, n_tokens, n_events).astype(np.int64)
    frm = rng.integers(-1, n_accounts, n_events).astype(np.int64)
    to = rng.integers(-1, n_accounts, n_events).astype(np.int64)
    args = (day, tok, frm, to, n_accounts, n_tokens)

    rows = []
    pure = timeit(lambda: _pure.replay_changes(*args), repeat=3)
    rows.append(("balance replay", f"{n_events:,} events", "python", pure))
    if _core is not None:
        comp = timeit(lambda: _core.replay_changes(*args))
        rows.append(("balance replay", f"{n_events:,} events", "cython", comp))
        out_p = _pure.replay_changes(*args)
        out_c = _core.replay_changes(*args)
        assert all(np.array_equal(a, b) for a, b in zip(out_p, out_c)), "backends diverge"
    return rows


def bench_bass():
    t_grid = np.arange(1.0, 366.0)
    params = (0.0007204043831322507, 0.003143021198831124, 4_826_322.792011898)
    rows = []
    pure = timeit(lambda: _pure.bass_rk4(*params, 0.0, t_grid, 0.1), repeat=20)
    rows.append(("bass rk4", "365 days @ 0.1", "python", pure))
    if _core is not None:
        comp = timeit(lambda: _core.bass_rk4(*params, 0.0, t_grid, 0.1), repeat=20)
        rows.append(("bass rk4", "365 days @ 0.1", "cython", comp))
        assert np.array_equal(_pure.bass_rk4(*params, 0.0, t_grid, 0.1),
                              _core.bass_rk4(*params, 0.0, t_grid, 0.1))
    return rows


def bench_bass_fit():
    import os

    from substrace.growthfit import ModelKind, bass_curve, fit

    t_grid = np.arange(1.0, 366.0)
    curve = bass_curve(0.00072, 0.00314, 4.8e6, 0.0, t_grid)
    rows = []
    for backend, env in (("python", "1"), ("cython", "")):
        if backend == "cython" and _core is None:
            continue
        # kernels pick their backend at import; patch the dispatch directly
        import substrace.kernels as k
        original = k.bass_rk4
        k.bass_rk4 = _pure.bass_rk4 if backend == "python" else _core.bass_rk4
        try:
            elapsed = timeit(lambda: fit(curve, ModelKind.BASS, seed=0), repeat=3)
        finally:
            k.bass_rk4 = original
        rows.append(("bass 3-param fit", "5 starts, LM", backend, elapsed))
    return rows


def main():
    print(f"{'kernel':<18} {'workload':<18} {'backend':<8} {'best time':>12}")
    all_rows = bench_replay() + bench_bass() + bench_bass_fit()
    by_key = {}
    for kernel, workload, backend, elapsed in all_rows:
        print(f"{kernel:<18} {workload:<18} {backend:<8} {elapsed * 1e3:>9.2f} ms")
        by_key.setdefault((kernel, workload), {})[backend] = elapsed
    print()
    for (kernel, workload), times in by_key.items():
        if "cython" in times and "python" in times:
            print(f"{kernel}: compiled speedup x{times['python'] / times['cython']:.1f}")


if __name__ == "__main__":
    main()
