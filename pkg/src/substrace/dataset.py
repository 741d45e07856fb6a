"""Immutable analysis snapshot built from the four input files.

Day arithmetic everywhere below is an integer offset from ``epoch`` (the
earliest date appearing anywhere in the dataset). Market and social records
are stored as dense (project, day) panels; missing cells are NaN for the
market stats and zero for engagement counts (a day without tweets is zero
engagement, not missing data).
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from .core import Project, ProjectId, TimeWindow
from .errors import EmptyWindow, InvalidValue, ServiceNotReady
from .ingest import (
    RoleIndex,
    parse_daily_stats,
    parse_projects,
    parse_social,
    parse_transfers,
)

DATA_FILES = ("projects.csv", "transfers.csv", "daily_stats.csv", "social.csv")
MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class Dataset:
    projects: tuple[Project, ...]          # sorted by id
    epoch: date
    end_day: int                           # last day index in the span
    role: RoleIndex
    launch_day: np.ndarray                 # (n,) int
    expiry_day: np.ndarray                 # (n,) int, last transfer day (launch if none)
    floor_price: np.ndarray                # (n, days) float, NaN = missing
    sales_volume: np.ndarray
    whale_count: np.ndarray
    engagement: np.ndarray                 # (n, days, 4) retweets/replies/likes/quotes
    sentiment: np.ndarray                  # (n, days) float, NaN = missing

    @property
    def project_ids(self) -> list[ProjectId]:
        return [p.id for p in self.projects]

    @property
    def n_days(self) -> int:
        return self.end_day + 1

    def index_of(self, pid: ProjectId) -> int:
        return self._pindex[pid]

    def __post_init__(self):
        object.__setattr__(self, "_pindex", {p.id: i for i, p in enumerate(self.projects)})

    # --- day arithmetic ----------------------------------------------------

    def day_index(self, d: date) -> int:
        return (d - self.epoch).days

    def date_of(self, idx: int) -> date:
        return self.epoch + timedelta(days=int(idx))

    def window_range(self, window: TimeWindow) -> tuple[int, int]:
        """Clip a window to the data span; fully outside raises EmptyWindow."""
        d0 = self.day_index(window.start)
        d1 = self.day_index(window.end)
        if d1 < 0 or d0 > self.end_day:
            raise EmptyWindow(
                f"window {window.start}..{window.end} outside data span "
                f"{self.epoch}..{self.date_of(self.end_day)}")
        return d0, d1

    # --- liveness ----------------------------------------------------------

    def alive_mask(self, d0: int, d1: int) -> np.ndarray:
        """Launched on or before the window end, not expired before its start."""
        return (self.launch_day <= d1) & (self.expiry_day >= d0)

    def alive_ids(self, window: TimeWindow) -> list[ProjectId]:
        d0, d1 = self.window_range(window)
        mask = self.alive_mask(d0, d1)
        return [p.id for p, m in zip(self.projects, mask) if m]

    # --- role index adapters (dataset day coords == role day coords) -------

    def role_project(self, i: int) -> int | None:
        """RoleIndex project slot for dataset project i; None if no events."""
        pid = self.projects[i].id
        try:
            return self.role.project_index(pid)
        except KeyError:
            return None

    # --- per-project series -------------------------------------------------

    def popularity_panel(self, d0: int, d1: int, weights) -> np.ndarray:
        """(n_projects, days) weighted engagement sums over [d0, d1]."""
        lo, hi = max(d0, 0), min(d1, self.end_day)
        n = len(self.projects)
        out = np.zeros((n, d1 - d0 + 1), dtype=np.float64)
        if lo <= hi:
            w = np.asarray(weights, dtype=np.float64)
            block = self.engagement[:, lo:hi + 1, :] @ w
            out[:, lo - d0:hi - d0 + 1] = block
        return out

    def holder_count_series(self, i: int, d0: int, d1: int) -> np.ndarray:
        rp = self.role_project(i)
        if rp is None:
            return np.zeros(d1 - d0 + 1, dtype=np.int64)
        return self.role.holder_count_series(rp, d0, d1)


def build_dataset(projects, transfers, stats, social) -> Dataset:
    """Assemble a Dataset from parsed records; validates cross-file identity."""
    if not projects:
        raise InvalidValue("no projects defined")
    projects = tuple(sorted(projects, key=lambda p: p.id))
    known = {p.id for p in projects}
    for e in transfers:
        if e.project not in known:
            raise InvalidValue(f"transfer references unknown project {e.project}")
    for r in stats:
        if r.project not in known:
            raise InvalidValue(f"daily stats reference unknown project {r.project}")
    for r in social:
        if r.project not in known:
            raise InvalidValue(f"social rows reference unknown project {r.project}")

    dates = [p.launch_date for p in projects]
    dates += [e.timestamp.date() for e in transfers]
    dates += [r.date for r in stats]
    dates += [r.date for r in social]
    epoch = min(dates)
    end_day = max((d - epoch).days for d in dates)

    first_event: dict[str, date] = {}
    last_event: dict[str, date] = {}
    for e in transfers:
        d = e.timestamp.date()
        first_event.setdefault(e.project, d)
        if d < first_event[e.project]:
            first_event[e.project] = d
        if e.project not in last_event or d > last_event[e.project]:
            last_event[e.project] = d
    for p in projects:
        if p.id in first_event and p.launch_date > first_event[p.id]:
            raise InvalidValue(
                f"{p.id}: launch date {p.launch_date} after first transfer "
                f"{first_event[p.id]}")

    n = len(projects)
    days = end_day + 1
    pindex = {p.id: i for i, p in enumerate(projects)}

    launch_day = np.array([(p.launch_date - epoch).days for p in projects], dtype=np.int64)
    expiry_day = launch_day.copy()
    for pid, d in last_event.items():
        expiry_day[pindex[pid]] = (d - epoch).days

    floor_price = np.full((n, days), np.nan)
    sales_volume = np.full((n, days), np.nan)
    whale_count = np.full((n, days), np.nan)
    for r in stats:
        i, d = pindex[r.project], (r.date - epoch).days
        floor_price[i, d] = r.floor_price
        sales_volume[i, d] = r.sales_volume
        whale_count[i, d] = r.whale_count

    engagement = np.zeros((n, days, 4), dtype=np.float64)
    sentiment = np.full((n, days), np.nan)
    for r in social:
        i, d = pindex[r.project], (r.date - epoch).days
        engagement[i, d, :] = (r.retweets, r.replies, r.likes, r.quotes)
        sentiment[i, d] = r.sentiment

    role = RoleIndex(transfers, epoch=epoch)
    return Dataset(
        projects=projects, epoch=epoch, end_day=end_day, role=role,
        launch_day=launch_day, expiry_day=expiry_day,
        floor_price=floor_price, sales_volume=sales_volume, whale_count=whale_count,
        engagement=engagement, sentiment=sentiment,
    )


def load_dataset(data_dir) -> Dataset:
    """Load the four CSVs from a directory."""
    root = Path(data_dir)
    paths = {name: root / name for name in DATA_FILES}
    missing = [name for name, p in paths.items() if not p.is_file()]
    if missing:
        raise ServiceNotReady(f"missing data files in {root}: {', '.join(missing)}")
    with open(paths["projects.csv"], newline="") as f:
        projects = parse_projects(f)
    with open(paths["transfers.csv"], newline="") as f:
        transfers = parse_transfers(f)
    with open(paths["daily_stats.csv"], newline="") as f:
        stats = parse_daily_stats(f)
    with open(paths["social.csv"], newline="") as f:
        social = parse_social(f)
    return build_dataset(projects, transfers, stats, social)


def write_manifest(data_dir, dataset: Dataset) -> dict:
    """Record row counts and content digests next to the data files."""
    root = Path(data_dir)
    files = {}
    for name in DATA_FILES:
        path = root / name
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        with open(path, newline="") as f:
            rows = sum(1 for _ in f) - 1
        files[name] = {"rows": rows, "sha256": digest}
    manifest = {
        "files": files,
        "projects": len(dataset.projects),
        "wallets": len(dataset.role.wallets),
        "span": {
            "start": dataset.epoch.isoformat(),
            "end": dataset.date_of(dataset.end_day).isoformat(),
        },
        "skipped_transfers": len(dataset.role.skipped),
    }
    with open(root / MANIFEST_NAME, "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return manifest


def default_data_dir() -> str | None:
    return os.environ.get("SUBSTRACE_DATA")


class LiveFetcher:
    """Interface stub for live data acquisition (intentionally unimplemented).

    A concrete fetcher would pull the three source feeds and write them in
    the file formats load_dataset consumes; the analysis pipeline itself
    stays file-based. Kept as a documented seam only.
    """

    def fetch_transfers(self, contracts, since):  # pragma: no cover - stub
        raise NotImplementedError("live transfer crawling is out of scope")

    def fetch_daily_stats(self, contracts, since):  # pragma: no cover - stub
        raise NotImplementedError("live market stats are out of scope")

    def fetch_social(self, hashtags, since):  # pragma: no cover - stub
        raise NotImplementedError("live social data is out of scope")
