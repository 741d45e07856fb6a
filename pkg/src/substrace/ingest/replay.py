"""Balance replay: from raw transfer events to daily buyer/seller/holder roles.

The full log is always replayed from its first event (never from the window
start) so holder sets at any window boundary are exact. The per-event loop
runs in the selected kernel backend; everything around it is vectorized
bookkeeping over integer-encoded events.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import date, timedelta

import numpy as np

from .. import kernels
from ..core import ZERO_ADDRESS, ProjectId, TimeWindow, WalletAddress
from ..errors import InvalidValue
from .parsers import TransferEvent

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DailyRoleRecord:
    project: ProjectId
    date: date
    sellers: frozenset[WalletAddress]
    buyers: frozenset[WalletAddress]
    holders: frozenset[WalletAddress]


@dataclass(frozen=True)
class SkippedTransfer:
    """A transfer whose sender did not own the token; reported, not applied."""

    project: ProjectId
    wallet: WalletAddress
    date: date
    reason: str = "NegativeBalance"


class RoleIndex:
    """Integer-encoded event log with per-project role and holder tables.

    Wallet vocabulary excludes the zero address (encoded as -1). Ownership is
    tracked per token id, so a wallet holding several tokens of one project is
    a single holder.
    """

    def __init__(self, events: list[TransferEvent], epoch: date | None = None):
        self.projects: list[ProjectId] = sorted({e.project for e in events})
        self._pindex = {p: i for i, p in enumerate(self.projects)}
        wallets = {e.from_addr for e in events} | {e.to_addr for e in events}
        wallets.discard(ZERO_ADDRESS)
        self.wallets: list[WalletAddress] = sorted(wallets)
        self._windex = {w: i for i, w in enumerate(self.wallets)}

        n = len(events)
        if epoch is None:
            epoch = min(e.timestamp.date() for e in events) if n else date(1970, 1, 1)
        self.epoch: date = epoch
        self.last_day: int = (
            max((e.timestamp.date() - epoch).days for e in events) if n else -1
        )

        proj = np.empty(n, dtype=np.int32)
        day = np.empty(n, dtype=np.int32)
        wfrom = np.empty(n, dtype=np.int64)
        wto = np.empty(n, dtype=np.int64)
        tok = np.empty(n, dtype=np.int64)
        for i, e in enumerate(events):
            proj[i] = self._pindex[e.project]
            day[i] = (e.timestamp.date() - self.epoch).days
            wfrom[i] = self._windex.get(e.from_addr, -1)
            wto[i] = self._windex.get(e.to_addr, -1)
            tok[i] = e.token_id
        if n and np.any(np.diff(day) < 0):
            raise InvalidValue("transfer events must be sorted by timestamp")

        # dense (project, wallet) accounts and (project, token) keys
        nw = len(self.wallets)
        acct_from = np.where(wfrom >= 0, proj.astype(np.int64) * nw + wfrom, -1)
        acct_to = np.where(wto >= 0, proj.astype(np.int64) * nw + wto, -1)
        pairs = np.unique(np.concatenate([acct_from[acct_from >= 0], acct_to[acct_to >= 0]]))
        self._acct_pairs = pairs  # sorted; acct id = position in this table
        f_enc = np.where(acct_from >= 0, np.searchsorted(pairs, acct_from), -1)
        t_enc = np.where(acct_to >= 0, np.searchsorted(pairs, acct_to), -1)

        if n:
            tok_pairs, tok_enc = np.unique(
                np.stack([proj.astype(np.int64), tok]), axis=1, return_inverse=True,
            )
            n_tokens = tok_pairs.shape[1]
            tok_enc = tok_enc.reshape(-1)
        else:
            tok_enc = np.zeros(0, dtype=np.int64)
            n_tokens = 0

        chg_acct, chg_day, chg_delta, applied = kernels.replay_changes(
            day, tok_enc.astype(np.int64), f_enc.astype(np.int64),
            t_enc.astype(np.int64), len(pairs), n_tokens,
        )

        self.skipped: list[SkippedTransfer] = [
            SkippedTransfer(events[i].project, events[i].from_addr, events[i].timestamp.date())
            for i in np.flatnonzero(~applied)
        ]
        for s in self.skipped:
            log.warning("skipped transfer: %s %s %s (NegativeBalance)", s.project, s.wallet, s.date)

        self._n = n
        # per-event tables restricted to applied events, grouped by project
        keep = np.flatnonzero(applied)
        self._ev_order = keep[np.argsort(proj[keep], kind="stable")]
        self._ev_proj = proj[self._ev_order]
        self._ev_day = day[self._ev_order]
        self._ev_from = wfrom[self._ev_order]
        self._ev_to = wto[self._ev_order]
        self._ev_bounds = np.searchsorted(self._ev_proj, np.arange(len(self.projects) + 1))

        # change stream decoded back to (project, wallet), grouped by project
        chg_pairs = pairs[chg_acct]
        chg_proj = (chg_pairs // nw).astype(np.int32)
        chg_wallet = (chg_pairs % nw).astype(np.int64)
        order = np.argsort(chg_proj, kind="stable")  # stream is day-ordered already
        self._chg_proj = chg_proj[order]
        self._chg_day = chg_day[order]
        self._chg_wallet = chg_wallet[order]
        self._chg_delta = chg_delta[order].astype(np.int64)
        self._chg_bounds = np.searchsorted(self._chg_proj, np.arange(len(self.projects) + 1))

        # first holder-entry day per (project, wallet), sorted per project
        self._first_enter: list[np.ndarray] = []
        self._intervals: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []
        for p in range(len(self.projects)):
            lo, hi = self._chg_bounds[p], self._chg_bounds[p + 1]
            w = self._chg_wallet[lo:hi]
            d = self._chg_day[lo:hi]
            s = self._chg_delta[lo:hi]
            enters = s > 0
            if enters.any():
                uw, first_idx = np.unique(w[enters], return_index=True)
                self._first_enter.append(np.sort(d[enters][first_idx]))
            else:
                self._first_enter.append(np.empty(0, dtype=np.int32))
            # pair up enter/leave per wallet: entries alternate +1/-1 chronologically
            ew, ed = w[enters], d[enters]
            lw, ld = w[~enters], d[~enters]
            # sort both by (wallet, day); k-th leave of a wallet closes its k-th enter
            eo = np.lexsort((ed, ew))
            lo_ = np.lexsort((ld, lw))
            ew, ed = ew[eo], ed[eo]
            lw, ld = lw[lo_], ld[lo_]
            leave_days = np.full(len(ew), np.iinfo(np.int64).max, dtype=np.int64)
            li = np.searchsorted(ew, lw, side="left")
            # each leave matches the enter at its wallet-run offset
            if len(lw):
                run_start = np.searchsorted(lw, lw, side="left")
                offset = np.arange(len(lw)) - run_start
                leave_days[li + offset] = ld
            self._intervals.append((ew, ed.astype(np.int64), leave_days))

    # --- day arithmetic ---------------------------------------------------

    def day_index(self, d: date) -> int:
        return (d - self.epoch).days

    def date_of(self, idx: int) -> date:
        return self.epoch + timedelta(days=int(idx))

    def project_index(self, pid: ProjectId) -> int:
        return self._pindex[pid]

    # --- role queries (wallet index arrays, sorted unique) -----------------

    def _event_slice(self, p: int, d0: int, d1: int):
        lo, hi = self._ev_bounds[p], self._ev_bounds[p + 1]
        days = self._ev_day[lo:hi]
        a = lo + np.searchsorted(days, d0, side="left")
        b = lo + np.searchsorted(days, d1 + 1, side="left")
        return a, b

    def sellers_union(self, p: int, d0: int, d1: int) -> np.ndarray:
        a, b = self._event_slice(p, d0, d1)
        w = self._ev_from[a:b]
        return np.unique(w[w >= 0])

    def buyers_union(self, p: int, d0: int, d1: int) -> np.ndarray:
        a, b = self._event_slice(p, d0, d1)
        w = self._ev_to[a:b]
        return np.unique(w[w >= 0])

    def transfer_count(self, p: int, d0: int, d1: int) -> int:
        a, b = self._event_slice(p, d0, d1)
        return int(b - a)

    def daily_transfer_counts(self, p: int, d0: int, d1: int) -> np.ndarray:
        a, b = self._event_slice(p, d0, d1)
        days = self._ev_day[a:b]
        return np.bincount(days - d0, minlength=d1 - d0 + 1)

    def holders_at(self, p: int, d: int) -> np.ndarray:
        """EOD holder wallet indices for day d (sorted)."""
        lo, hi = self._chg_bounds[p], self._chg_bounds[p + 1]
        upto = lo + np.searchsorted(self._chg_day[lo:hi], d + 1, side="left")
        w = self._chg_wallet[lo:upto]
        s = self._chg_delta[lo:upto]
        if not len(w):
            return np.empty(0, dtype=np.int64)
        uw, inv = np.unique(w, return_inverse=True)
        net = np.bincount(inv, weights=s.astype(np.float64))
        return uw[net > 0]

    def holders_within(self, p: int, d0: int, d1: int) -> np.ndarray:
        """Distinct wallets holding at any EOD in [d0, d1] (sorted)."""
        ew, ed, ld = self._intervals[p]
        mask = (ed <= d1) & (ld > d0)
        return np.unique(ew[mask])

    def cumulative_holders(self, p: int, d: int) -> int:
        """Distinct wallets that ever held project p up to EOD d."""
        return int(np.searchsorted(self._first_enter[p], d + 1, side="left"))

    def holder_count_series(self, p: int, d0: int, d1: int) -> np.ndarray:
        """EOD holder counts per day over [d0, d1]."""
        lo, hi = self._chg_bounds[p], self._chg_bounds[p + 1]
        d = self._chg_day[lo:hi]
        s = self._chg_delta[lo:hi]
        base = int(s[d < d0].sum()) if len(s) else 0
        n_days = d1 - d0 + 1
        in_win = (d >= d0) & (d <= d1)
        deltas = np.bincount(d[in_win] - d0, weights=s[in_win].astype(np.float64),
                             minlength=n_days)
        return base + np.cumsum(deltas).astype(np.int64)

    def daily_role_sets(self, p: int, d: int) -> tuple[np.ndarray, np.ndarray]:
        """(sellers, buyers) wallet indices for a single day."""
        a, b = self._event_slice(p, d, d)
        f = self._ev_from[a:b]
        t = self._ev_to[a:b]
        return np.unique(f[f >= 0]), np.unique(t[t >= 0])

    def daily_role_counts(self, p: int, d0: int, d1: int) -> tuple[np.ndarray, np.ndarray]:
        """(seller_count, buyer_count) per day over [d0, d1]."""
        n_days = d1 - d0 + 1
        sellers = np.zeros(n_days, dtype=np.int64)
        buyers = np.zeros(n_days, dtype=np.int64)
        a, b = self._event_slice(p, d0, d1)
        days = self._ev_day[a:b]
        for off in range(n_days):
            lo, hi = np.searchsorted(days, [d0 + off, d0 + off + 1])
            f = self._ev_from[a + lo:a + hi]
            t = self._ev_to[a + lo:a + hi]
            sellers[off] = len(np.unique(f[f >= 0]))
            buyers[off] = len(np.unique(t[t >= 0]))
        return sellers, buyers

    def wallet_names(self, idx: np.ndarray) -> frozenset[WalletAddress]:
        return frozenset(self.wallets[int(i)] for i in idx)


def replay_roles(events: list[TransferEvent], window: TimeWindow,
                 skipped: list[SkippedTransfer] | None = None) -> list[DailyRoleRecord]:
    """Materialize per-(project, day) role records for every day in the window.

    Mints create a buyer and no seller; burns the reverse. Holder sets are
    end-of-day snapshots; a wallet leaves the set on the day its balance hits
    zero. Inconsistent transfers are skipped and reported via ``skipped`` and
    the module logger.
    """
    index = RoleIndex(events)
    if skipped is not None:
        skipped.extend(index.skipped)
    d0 = index.day_index(window.start)
    d1 = index.day_index(window.end)
    records = []
    for pid in index.projects:
        p = index.project_index(pid)
        holders = set(index.holders_at(p, d0 - 1).tolist())
        lo, hi = index._chg_bounds[p], index._chg_bounds[p + 1]
        cd = index._chg_day[lo:hi]
        cw = index._chg_wallet[lo:hi]
        cs = index._chg_delta[lo:hi]
        for d in range(d0, d1 + 1):
            a, b = np.searchsorted(cd, [d, d + 1])
            for w_, s_ in zip(cw[a:b], cs[a:b]):
                if s_ > 0:
                    holders.add(int(w_))
                else:
                    holders.discard(int(w_))
            sellers_i, buyers_i = index.daily_role_sets(p, d)
            records.append(DailyRoleRecord(
                project=pid,
                date=index.date_of(d),
                sellers=index.wallet_names(sellers_i),
                buyers=index.wallet_names(buyers_i),
                holders=frozenset(index.wallets[w] for w in holders),
            ))
    records.sort(key=lambda r: (r.project, r.date))
    return records
