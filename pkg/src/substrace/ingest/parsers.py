"""Readers for the four file-based inputs.

All four are RFC 4180 CSVs with a header row; columns are located by name so
extra columns and reordering are tolerated. Parse failures raise with the
1-based line number of the offending row.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date, datetime, timezone

from ..core import ZERO_ADDRESS, Project, ProjectId, WalletAddress, normalize_id
from ..errors import FieldValueError, SchemaError

TRANSFER_COLUMNS = ("contract", "timestamp", "from", "to", "token_id")
PROJECT_COLUMNS = ("contract", "name", "hashtag", "launch_date")
STATS_COLUMNS = ("contract", "date", "floor_price", "sales_volume", "whale_count")
SOCIAL_COLUMNS = ("contract", "date", "retweets", "replies", "likes", "quotes", "sentiment")


@dataclass(frozen=True)
class TransferEvent:
    project: ProjectId
    timestamp: datetime
    from_addr: WalletAddress
    to_addr: WalletAddress
    token_id: int


@dataclass(frozen=True)
class DailyProjectStats:
    project: ProjectId
    date: date
    floor_price: float
    sales_volume: float
    whale_count: int


@dataclass(frozen=True)
class SocialDayRecord:
    project: ProjectId
    date: date
    retweets: int
    replies: int
    likes: int
    quotes: int
    sentiment: float


def _header_map(reader, required):
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("missing header row", line=1) from None
    positions = {name.strip().lower(): i for i, name in enumerate(header)}
    cols = {}
    for name in required:
        if name not in positions:
            raise SchemaError(f"missing column {name!r}", line=1)
        cols[name] = positions[name]
    return cols


def _cell(row, cols, name, line):
    idx = cols[name]
    if idx >= len(row):
        raise SchemaError(f"row too short, no {name!r} value", line=line)
    return row[idx].strip()


def _parse_timestamp(text, line):
    try:
        ts = datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError:
        raise FieldValueError(f"unparseable timestamp {text!r}", line=line) from None
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def _parse_date(text, line):
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise FieldValueError(f"unparseable date {text!r}", line=line) from None


def _parse_int(text, name, line, minimum=0):
    try:
        value = int(text)
    except ValueError:
        raise FieldValueError(f"unparseable {name} {text!r}", line=line) from None
    if value < minimum:
        raise FieldValueError(f"{name} {value} below {minimum}", line=line)
    return value


def _parse_float(text, name, line, minimum=None, maximum=None):
    try:
        value = float(text)
    except ValueError:
        raise FieldValueError(f"unparseable {name} {text!r}", line=line) from None
    if value != value:
        raise FieldValueError(f"{name} is NaN", line=line)
    if minimum is not None and value < minimum:
        raise FieldValueError(f"{name} {value} below {minimum}", line=line)
    if maximum is not None and value > maximum:
        raise FieldValueError(f"{name} {value} above {maximum}", line=line)
    return value


def parse_transfers(stream) -> list[TransferEvent]:
    """Read a transfers CSV; events come back sorted by timestamp, stable on ties."""
    reader = csv.reader(stream)
    cols = _header_map(reader, TRANSFER_COLUMNS)
    events = []
    for line, row in enumerate(reader, start=2):
        if not row:
            continue
        project = normalize_id(_cell(row, cols, "contract", line))
        ts = _parse_timestamp(_cell(row, cols, "timestamp", line), line)
        from_addr = normalize_id(_cell(row, cols, "from", line))
        to_addr = normalize_id(_cell(row, cols, "to", line))
        if from_addr == to_addr:
            raise FieldValueError("self-transfer (from == to)", line=line)
        token_id = _parse_int(_cell(row, cols, "token_id", line), "token_id", line)
        events.append(TransferEvent(project, ts, from_addr, to_addr, token_id))
    events.sort(key=lambda e: e.timestamp)  # timsort is stable on ties
    return events


def serialize_transfers(events, stream) -> None:
    """Inverse of parse_transfers for well-formed event lists."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(TRANSFER_COLUMNS)
    for e in events:
        writer.writerow([
            e.project,
            e.timestamp.strftime("%Y-%m-%dT%H:%M:%SZ"),
            e.from_addr,
            e.to_addr,
            e.token_id,
        ])


def parse_projects(stream) -> list[Project]:
    reader = csv.reader(stream)
    cols = _header_map(reader, PROJECT_COLUMNS)
    out = []
    seen = set()
    for line, row in enumerate(reader, start=2):
        if not row:
            continue
        pid = normalize_id(_cell(row, cols, "contract", line))
        if pid in seen:
            raise SchemaError(f"duplicate project {pid}", line=line)
        seen.add(pid)
        out.append(Project(
            id=pid,
            name=_cell(row, cols, "name", line),
            twitter_hashtag=_cell(row, cols, "hashtag", line),
            launch_date=_parse_date(_cell(row, cols, "launch_date", line), line),
        ))
    return out


def parse_daily_stats(stream) -> list[DailyProjectStats]:
    reader = csv.reader(stream)
    cols = _header_map(reader, STATS_COLUMNS)
    out = []
    seen = set()
    for line, row in enumerate(reader, start=2):
        if not row:
            continue
        pid = normalize_id(_cell(row, cols, "contract", line))
        day = _parse_date(_cell(row, cols, "date", line), line)
        if (pid, day) in seen:
            raise SchemaError(f"duplicate stats row for {pid} {day}", line=line)
        seen.add((pid, day))
        out.append(DailyProjectStats(
            project=pid,
            date=day,
            floor_price=_parse_float(_cell(row, cols, "floor_price", line), "floor_price", line, minimum=0.0),
            sales_volume=_parse_float(_cell(row, cols, "sales_volume", line), "sales_volume", line, minimum=0.0),
            whale_count=_parse_int(_cell(row, cols, "whale_count", line), "whale_count", line),
        ))
    return out


def parse_social(stream) -> list[SocialDayRecord]:
    reader = csv.reader(stream)
    cols = _header_map(reader, SOCIAL_COLUMNS)
    out = []
    seen = set()
    for line, row in enumerate(reader, start=2):
        if not row:
            continue
        pid = normalize_id(_cell(row, cols, "contract", line))
        day = _parse_date(_cell(row, cols, "date", line), line)
        if (pid, day) in seen:
            raise SchemaError(f"duplicate social row for {pid} {day}", line=line)
        seen.add((pid, day))
        out.append(SocialDayRecord(
            project=pid,
            date=day,
            retweets=_parse_int(_cell(row, cols, "retweets", line), "retweets", line),
            replies=_parse_int(_cell(row, cols, "replies", line), "replies", line),
            likes=_parse_int(_cell(row, cols, "likes", line), "likes", line),
            quotes=_parse_int(_cell(row, cols, "quotes", line), "quotes", line),
            sentiment=_parse_float(_cell(row, cols, "sentiment", line), "sentiment", line,
                                   minimum=-1.0, maximum=1.0),
        ))
    return out


__all__ = [
    "TransferEvent", "DailyProjectStats", "SocialDayRecord",
    "parse_transfers", "serialize_transfers", "parse_projects",
    "parse_daily_stats", "parse_social", "ZERO_ADDRESS",
]
