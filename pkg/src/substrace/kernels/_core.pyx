# Compiled twins of the kernels in _pure.py; same contracts, C-speed loops.

import numpy as np

cimport numpy as cnp
from libc.math cimport ceil

cnp.import_array()


def replay_changes(day, token_key, from_acct, to_acct, n_accounts, n_tokens):
    cdef cnp.int32_t[::1] day_v = np.ascontiguousarray(day, dtype=np.int32)
    cdef cnp.int64_t[::1] tok_v = np.ascontiguousarray(token_key, dtype=np.int64)
    cdef cnp.int64_t[::1] from_v = np.ascontiguousarray(from_acct, dtype=np.int64)
    cdef cnp.int64_t[::1] to_v = np.ascontiguousarray(to_acct, dtype=np.int64)

    cdef Py_ssize_t n = day_v.shape[0]
    cdef Py_ssize_t na = int(n_accounts)
    cdef Py_ssize_t nt = int(n_tokens)

    owner_arr = np.full(nt, -1, dtype=np.int64)
    bal_arr = np.zeros(na, dtype=np.int64)
    holder_arr = np.zeros(na, dtype=np.uint8)
    dirty_arr = np.zeros(na, dtype=np.uint8)
    touched_arr = np.empty(na, dtype=np.int64)
    cdef cnp.int64_t[::1] owner = owner_arr
    cdef cnp.int64_t[::1] bal = bal_arr
    cdef cnp.uint8_t[::1] holder = holder_arr
    cdef cnp.uint8_t[::1] dirty = dirty_arr
    cdef cnp.int64_t[::1] touched = touched_arr
    cdef Py_ssize_t n_touched = 0

    # at most one enter/exit per touched account per day, <= 2 per event
    chg_acct_arr = np.empty(2 * n + 2, dtype=np.int64)
    chg_day_arr = np.empty(2 * n + 2, dtype=np.int32)
    chg_delta_arr = np.empty(2 * n + 2, dtype=np.int8)
    applied_arr = np.zeros(n, dtype=bool)
    cdef cnp.int64_t[::1] chg_acct = chg_acct_arr
    cdef cnp.int32_t[::1] chg_day = chg_day_arr
    cdef cnp.int8_t[::1] chg_delta = chg_delta_arr
    cdef cnp.uint8_t[::1] applied = applied_arr.view(np.uint8)
    cdef Py_ssize_t n_chg = 0

    cdef Py_ssize_t i, j
    cdef cnp.int64_t a, t, f, g
    cdef cnp.int32_t cur = day_v[0] if n > 0 else 0
    cdef cnp.int32_t d
    cdef cnp.uint8_t now

    for i in range(n):
        d = day_v[i]
        if d != cur:
            for j in range(n_touched):
                a = touched[j]
                dirty[a] = 0
                now = 1 if bal[a] > 0 else 0
                if now != holder[a]:
                    holder[a] = now
                    chg_acct[n_chg] = a
                    chg_day[n_chg] = cur
                    chg_delta[n_chg] = 1 if now else -1
                    n_chg += 1
            n_touched = 0
            cur = d
        t = tok_v[i]
        f = from_v[i]
        if owner[t] != f:
            continue
        g = to_v[i]
        owner[t] = g
        applied[i] = 1
        if f >= 0:
            bal[f] -= 1
            if dirty[f] == 0:
                dirty[f] = 1
                touched[n_touched] = f
                n_touched += 1
        if g >= 0:
            bal[g] += 1
            if dirty[g] == 0:
                dirty[g] = 1
                touched[n_touched] = g
                n_touched += 1
    for j in range(n_touched):
        a = touched[j]
        dirty[a] = 0
        now = 1 if bal[a] > 0 else 0
        if now != holder[a]:
            holder[a] = now
            chg_acct[n_chg] = a
            chg_day[n_chg] = cur
            chg_delta[n_chg] = 1 if now else -1
            n_chg += 1

    return (
        chg_acct_arr[:n_chg].copy(),
        chg_day_arr[:n_chg].copy(),
        chg_delta_arr[:n_chg].copy(),
        applied_arr,
    )


def bass_rk4(p, q, m, i0, t_grid, max_step=0.1):
    cdef double pp = p
    cdef double qq = q
    cdef double mm = m
    cdef double qm = qq / mm
    cdef double y = i0
    cdef double step = max_step
    cdef cnp.float64_t[::1] t_v = np.ascontiguousarray(t_grid, dtype=np.float64)
    cdef Py_ssize_t ngrid = t_v.shape[0]
    out_arr = np.empty(ngrid, dtype=np.float64)
    cdef cnp.float64_t[::1] out = out_arr

    cdef Py_ssize_t k, s, nsub
    cdef double t_prev, t_next, span, h, k1, k2, k3, k4, y2, y3, y4

    out[0] = y
    t_prev = t_v[0]
    for k in range(1, ngrid):
        t_next = t_v[k]
        span = t_next - t_prev
        # tolerance keeps exact multiples from picking up a phantom substep
        nsub = <Py_ssize_t>ceil(span / step - 1e-9)
        if nsub < 1:
            nsub = 1
        h = span / nsub
        for s in range(nsub):
            k1 = (pp + qm * y) * (mm - y)
            y2 = y + 0.5 * h * k1
            k2 = (pp + qm * y2) * (mm - y2)
            y3 = y + 0.5 * h * k2
            k3 = (pp + qm * y3) * (mm - y3)
            y4 = y + h * k3
            k4 = (pp + qm * y4) * (mm - y4)
            y = y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        out[k] = y
        t_prev = t_next
    return out_arr
