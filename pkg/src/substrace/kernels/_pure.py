"""Pure-Python kernels; the reference semantics the compiled core must match.

Both backends expose the same two functions:

``replay_changes``
    Single pass over a day-sorted, integer-encoded transfer log. Tracks
    per-token ownership and per-account balances, and emits the end-of-day
    holder-status change stream: one (+1/-1) record whenever an account's
    end-of-day balance crosses zero. An event applies only when the token's
    current owner equals the ``from`` side (-1 encodes the zero address /
    an unowned token, so the same rule covers mints and burns); anything
    else is a ledger inconsistency and the event is skipped.

``bass_rk4``
    Fixed-step 4th-order Runge-Kutta integration of
    dI/dt = (p + q*I/m) * (m - I), sampled at the requested grid points.
"""

from __future__ import annotations

import math

import numpy as np


def replay_changes(day, token_key, from_acct, to_acct, n_accounts, n_tokens):
    """Replay an encoded event log into an EOD holder change stream.

    Args:
        day: int32 array, non-decreasing day index per event.
        token_key: int64 array, dense token index in [0, n_tokens).
        from_acct, to_acct: int64 arrays, dense account index or -1 for the
            zero address.
        n_accounts, n_tokens: table sizes for the dense indices.

    Returns:
        (chg_acct, chg_day, chg_delta, applied): the first three are aligned
        arrays describing holder-set entries (+1) and exits (-1) at end of
        day; ``applied`` is a per-event bool mask (False = skipped).
    """
    n = len(day)
    day_l = [int(v) for v in day]
    tok_l = [int(v) for v in token_key]
    from_l = [int(v) for v in from_acct]
    to_l = [int(v) for v in to_acct]

    owner = [-1] * int(n_tokens)
    bal = [0] * int(n_accounts)
    holder = bytearray(int(n_accounts))
    dirty = bytearray(int(n_accounts))
    touched: list[int] = []

    chg_acct: list[int] = []
    chg_day: list[int] = []
    chg_delta: list[int] = []
    applied = np.zeros(n, dtype=bool)

    def flush(d):
        for a in touched:
            dirty[a] = 0
            now = 1 if bal[a] > 0 else 0
            if now != holder[a]:
                holder[a] = now
                chg_acct.append(a)
                chg_day.append(d)
                chg_delta.append(1 if now else -1)
        touched.clear()

    cur = day_l[0] if n else 0
    for i in range(n):
        d = day_l[i]
        if d != cur:
            flush(cur)
            cur = d
        t = tok_l[i]
        f = from_l[i]
        if owner[t] != f:
            continue  # inconsistent log row: sender does not own the token
        g = to_l[i]
        owner[t] = g
        applied[i] = True
        if f >= 0:
            bal[f] -= 1
            if not dirty[f]:
                dirty[f] = 1
                touched.append(f)
        if g >= 0:
            bal[g] += 1
            if not dirty[g]:
                dirty[g] = 1
                touched.append(g)
    if n:
        flush(cur)

    return (
        np.asarray(chg_acct, dtype=np.int64),
        np.asarray(chg_day, dtype=np.int32),
        np.asarray(chg_delta, dtype=np.int8),
        applied,
    )


def bass_rk4(p, q, m, i0, t_grid, max_step=0.1):
    """Integrate the Bass ODE from t_grid[0] with I(t_grid[0]) = i0."""
    p = float(p)
    q = float(q)
    m = float(m)
    out = np.empty(len(t_grid), dtype=np.float64)
    y = float(i0)
    out[0] = y
    qm = q / m
    t_prev = float(t_grid[0])
    for k in range(1, len(t_grid)):
        t_next = float(t_grid[k])
        span = t_next - t_prev
        # tolerance keeps exact multiples from picking up a phantom substep
        nsub = max(1, int(math.ceil(span / max_step - 1e-9)))
        h = span / nsub
        for _ in range(nsub):
            k1 = (p + qm * y) * (m - y)
            y2 = y + 0.5 * h * k1
            k2 = (p + qm * y2) * (m - y2)
            y3 = y + 0.5 * h * k2
            k3 = (p + qm * y3) * (m - y3)
            y4 = y + h * k3
            k4 = (p + qm * y4) * (m - y4)
            y += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        out[k] = y
        t_prev = t_next
    return out
