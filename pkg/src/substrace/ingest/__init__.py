from .parsers import (
    DailyProjectStats,
    SocialDayRecord,
    TransferEvent,
    parse_daily_stats,
    parse_projects,
    parse_social,
    parse_transfers,
    serialize_transfers,
)
from .replay import DailyRoleRecord, RoleIndex, SkippedTransfer, replay_roles
from .stats import (
    DEFAULT_POPULARITY_WEIGHTS,
    CorrResult,
    RoleFractions,
    pearson_correlation,
    popularity,
    role_fractions,
    spearman_correlation,
)

__all__ = [
    "TransferEvent", "DailyProjectStats", "SocialDayRecord", "DailyRoleRecord",
    "RoleIndex", "SkippedTransfer", "RoleFractions", "CorrResult",
    "parse_transfers", "serialize_transfers", "parse_projects",
    "parse_daily_stats", "parse_social", "replay_roles", "role_fractions",
    "popularity", "pearson_correlation", "spearman_correlation",
    "DEFAULT_POPULARITY_WEIGHTS",
]
