import random
from datetime import date, datetime, timedelta, timezone

import pytest

from substrace.core import ZERO_ADDRESS
from substrace.ingest import TransferEvent


def wallet(i: int) -> str:
    return f"0x{i + 1:040x}"  # offset keeps wallet(0) clear of the zero address


def contract(i: int) -> str:
    return f"0xc{i:039x}"


def make_event(project, day, from_addr, to_addr, token_id, base=date(2022, 1, 1), hour=12):
    ts = datetime(base.year, base.month, base.day, tzinfo=timezone.utc) \
        + timedelta(days=day, hours=hour)
    return TransferEvent(project, ts, from_addr, to_addr, token_id)


def random_log(seed, n_projects=3, n_wallets=12, n_tokens=8, n_days=20, n_events=200,
               invalid_rate=0.15):
    """Seeded random transfer log, including some inconsistent rows.

    Invalid rows name a sender that does not own the token; valid rows are
    generated from tracked ownership (mint / transfer / burn).
    """
    rng = random.Random(seed)
    owner = {}  # (project, token) -> wallet or zero
    events = []
    # draw days up front and generate chronologically so ownership tracking
    # matches replay order (same-day ties keep generation order)
    days = sorted(rng.randrange(n_days) for _ in range(n_events))
    for day in days:
        p = contract(rng.randrange(n_projects))
        t = rng.randrange(n_tokens)
        cur = owner.get((p, t), ZERO_ADDRESS)
        if rng.random() < invalid_rate:
            candidates = [wallet(i) for i in range(n_wallets) if wallet(i) != cur]
            frm = rng.choice(candidates)
            to = rng.choice([wallet(i) for i in range(n_wallets) if wallet(i) != frm]
                            + [ZERO_ADDRESS])
            events.append(make_event(p, day, frm, to, t))
            continue
        if cur == ZERO_ADDRESS:
            to = wallet(rng.randrange(n_wallets))
            events.append(make_event(p, day, ZERO_ADDRESS, to, t))
        else:
            roll = rng.random()
            if roll < 0.2:
                to = ZERO_ADDRESS  # burn
            else:
                to = wallet(rng.randrange(n_wallets))
                while to == cur:
                    to = wallet(rng.randrange(n_wallets))
            events.append(make_event(p, day, cur, to, t))
        owner[(p, t)] = to if to != ZERO_ADDRESS else ZERO_ADDRESS
    events.sort(key=lambda e: e.timestamp)
    return events


@pytest.fixture
def rng():
    return random.Random(1234)


def dataset_from_events(events, launches=None, stats=None, social=None, extra_projects=()):
    """Small Dataset assembled from events plus synthesized metadata.

    launches: optional {project: date}; defaults to each project's first event
    date. Social rows default to a deterministic per-project engagement level
    so popularity is non-degenerate.
    """
    from substrace.core import Project
    from substrace.dataset import build_dataset
    from substrace.ingest import DailyProjectStats, SocialDayRecord

    launches = dict(launches or {})
    pids = sorted({e.project for e in events} | set(launches) | set(extra_projects))
    first = {}
    for e in events:
        d = e.timestamp.date()
        if e.project not in first or d < first[e.project]:
            first[e.project] = d
    projects = []
    for k, pid in enumerate(pids):
        launch = launches.get(pid, first.get(pid, date(2022, 1, 1)))
        projects.append(Project(pid, f"Project {k}", f"#p{k}", launch))

    if events:
        span_start = min(first.values())
        span_end = max(e.timestamp.date() for e in events)
    else:
        span_start = span_end = date(2022, 1, 1)

    if social is None:
        social = []
        for k, pid in enumerate(pids):
            d = launches.get(pid, first.get(pid, span_start))
            while d <= span_end:
                base = 10 + 3 * k + (d.toordinal() % 5)
                social.append(SocialDayRecord(pid, d, base, base // 2, base * 2, 1, 0.1))
                d += timedelta(days=1)
    if stats is None:
        stats = []
        for k, pid in enumerate(pids):
            d = launches.get(pid, first.get(pid, span_start))
            while d <= span_end:
                stats.append(DailyProjectStats(pid, d, 1.0 + k, 5.0 + k + (d.toordinal() % 3), 2 + k))
                d += timedelta(days=1)
    return build_dataset(projects, events, stats, social)
