"""Synthetic substitutive markets with known ground truth.

The generator runs the original minimal-substitution mechanics forward as
wallet-migration probabilities: a wallet holding project i moves to a
launched project j with probability

    migration_scale * lambda_ij * N_j(t) / age_j(t)

per day, decided against the start-of-day state. Deliberately this is the
original closed form, not the revised rate the analysis pipeline estimates,
so recovery checks compare genuinely different formulas.

Every migration emits two transfers: the migrant's token of i goes to a
passive collector wallet (fresh demand; collectors never sell, keeping
seller/buyer sets attributable to true migrations), and a new token of j is
minted to the migrant. Supply therefore only ever grows by mints and daily
holder counts replayed from the emitted files match the tracked ground truth
exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from .errors import InsufficientPairs, InvalidValue, ScaleTooLarge
from .ingest.stats import CorrResult, spearman_correlation
from .mechanisms import PairMatrix

DEFAULT_SIM_START = date(2022, 1, 1)


def sim_contract(i: int) -> str:
    return "0x" + f"c{i:039x}"


def sim_wallet(i: int) -> str:
    return f"0x{i + 1:040x}"


@dataclass(frozen=True)
class PopularityProcess:
    base: tuple[float, ...]          # per-project starting engagement level
    decay: tuple[float, ...]         # exponential decay per day of age
    boost_amp: tuple[float, ...]     # periodic boost amplitude
    boost_period: tuple[float, ...]  # boost period in days
    noise: float = 0.0               # sd of seeded additive noise


@dataclass(frozen=True)
class SimConfig:
    n_projects: int
    n_wallets: int
    n_days: int
    launch_schedule: tuple[int, ...]
    true_lambda: np.ndarray
    popularity: PopularityProcess
    migration_scale: float
    seed: int
    init_holders: tuple[int, ...] = ()
    collector_fraction: float = 0.25
    init_mode: str = "random"    # "random": seeded draws; "disjoint": one project per trader
    sim_start: date = DEFAULT_SIM_START

    def __post_init__(self):
        n = self.n_projects
        if min(n, self.n_wallets, self.n_days) < 1:
            raise InvalidValue("counts must all be at least 1")
        if len(self.launch_schedule) != n:
            raise InvalidValue("launch_schedule length must equal n_projects")
        if any(d < 0 or d >= self.n_days for d in self.launch_schedule):
            raise InvalidValue("launch days must fall inside the simulated span")
        lam = np.asarray(self.true_lambda, dtype=np.float64)
        if lam.shape != (n, n):
            raise InvalidValue(f"true_lambda must be {n}x{n}")
        if np.any(np.diagonal(lam) != 0):
            raise InvalidValue("true_lambda diagonal must be zero")
        if not np.allclose(lam, lam.T):
            raise InvalidValue("true_lambda must be symmetric")
        if lam.min() < 0 or lam.max() > 1:
            raise InvalidValue("true_lambda entries must lie in [0, 1]")
        object.__setattr__(self, "true_lambda", lam)
        if not self.init_holders:
            per = max(self.n_wallets // (2 * n), 1)
            object.__setattr__(self, "init_holders", (per,) * n)
        if len(self.init_holders) != n:
            raise InvalidValue("init_holders length must equal n_projects")
        if self.migration_scale <= 0:
            raise InvalidValue("migration_scale must be positive")
        if not 0 <= self.collector_fraction < 1:
            raise InvalidValue("collector_fraction must be in [0, 1)")
        if self.init_mode not in ("random", "disjoint"):
            raise InvalidValue(f"unknown init_mode {self.init_mode!r}")
        if self.init_mode == "disjoint":
            n_traders = max(int(round(self.n_wallets * (1 - self.collector_fraction))), 1)
            if sum(self.init_holders) > n_traders:
                raise InvalidValue(
                    f"disjoint init needs {sum(self.init_holders)} traders, "
                    f"only {n_traders} available")
        for name in ("base", "decay", "boost_amp", "boost_period"):
            if len(getattr(self.popularity, name)) != n:
                raise InvalidValue(f"popularity.{name} length must equal n_projects")
        # launch-state bound: rejects configs that overflow on day one
        worst = self.migration_scale * float(
            (lam * np.asarray(self.init_holders)[None, :]).sum(axis=1).max())
        if worst > 1.0:
            raise ScaleTooLarge(
                f"wallet-day migration probability {worst:.3f} exceeds 1 at launch; "
                "reduce migration_scale")

    @property
    def project_ids(self) -> tuple[str, ...]:
        return tuple(sim_contract(i) for i in range(self.n_projects))


@dataclass(frozen=True)
class SimGroundTruth:
    config: SimConfig
    project_ids: tuple[str, ...]
    migrations: np.ndarray       # (n_days, n, n) realized migrant counts
    holder_counts: np.ndarray    # (n, n_days) end-of-day distinct holders

    def cumulative_migrants(self) -> np.ndarray:
        return self.migrations.sum(axis=0)


def simulate(config: SimConfig, out_dir) -> SimGroundTruth:
    """Run the market forward and emit the four ingest files plus ground truth.

    Byte-identical outputs for identical configs: one seeded generator, fixed
    iteration order, fixed formatting.
    """
    rng = np.random.default_rng(config.seed)
    n = config.n_projects
    lam = config.true_lambda
    n_traders = max(int(round(config.n_wallets * (1 - config.collector_fraction))), 1)
    traders = np.arange(n_traders)
    collectors = np.arange(n_traders, config.n_wallets)

    holdings: list[set[int]] = [set() for _ in range(n)]   # project -> wallets
    held_by: list[set[int]] = [set() for _ in range(config.n_wallets)]
    mint_counter = [0] * n
    token_of: list[dict[int, int]] = [dict() for _ in range(n)]  # project -> wallet -> token

    transfers_rows: list[tuple] = []
    migrations = np.zeros((config.n_days, n, n), dtype=np.int64)
    holder_counts = np.zeros((n, config.n_days), dtype=np.int64)

    def emit(proj: int, day: int, frm: int | None, to: int | None, token: int):
        stamp = (config.sim_start + timedelta(days=day)).isoformat() + "T12:00:00Z"
        frm_addr = sim_wallet(frm) if frm is not None else "0x" + "0" * 40
        to_addr = sim_wallet(to) if to is not None else "0x" + "0" * 40
        transfers_rows.append((sim_contract(proj), stamp, frm_addr, to_addr, token))

    def mint(proj: int, day: int, to: int):
        token = mint_counter[proj]
        mint_counter[proj] += 1
        emit(proj, day, None, to, token)
        holdings[proj].add(to)
        held_by[to].add(proj)
        token_of[proj][to] = token

    disjoint_cursor = 0
    for day in range(config.n_days):
        # launches first: the day's decisions see freshly minted holders
        for proj in range(n):
            if config.launch_schedule[proj] == day:
                size = min(config.init_holders[proj], n_traders)
                if config.init_mode == "disjoint":
                    initial = traders[disjoint_cursor:disjoint_cursor + size]
                    disjoint_cursor += size
                else:
                    initial = np.sort(rng.choice(traders, size=size, replace=False))
                for w in initial:
                    mint(proj, day, int(w))

        ages = np.array([day - config.launch_schedule[j] + 1 for j in range(n)], dtype=np.float64)
        launched = ages >= 1
        safe_ages = np.where(launched, ages, 1.0)
        counts = np.array([len(holdings[j]) for j in range(n)], dtype=np.float64)

        for src in range(n):
            if not launched[src] or not holdings[src]:
                continue
            probs = np.where(launched, config.migration_scale * lam[src] * counts / safe_ages, 0.0)
            probs[src] = 0.0
            total = float(probs.sum())
            if total > 1.0:
                raise ScaleTooLarge(
                    f"day {day}, project {src}: wallet-day migration probability "
                    f"{total:.3f} exceeds 1")
            if total <= 0.0:
                continue
            # snapshot: collectors never migrate, today's arrivals wait a day
            movers = np.array(sorted(w for w in holdings[src] if w < n_traders),
                              dtype=np.int64)
            if not len(movers):
                continue
            draws = rng.random(len(movers))
            migrants = movers[draws < total]
            if not len(migrants):
                continue
            dests = rng.choice(n, size=len(migrants), p=probs / total)
            for w, dst in zip(migrants, dests):
                w, dst = int(w), int(dst)
                if dst in held_by[w]:
                    continue  # one token per wallet per project
                pool = [c for c in collectors if src not in held_by[c]]
                if not pool:
                    pool = [t for t in traders if src not in held_by[t] and t != w]
                    if not pool:
                        continue
                recipient = int(pool[int(rng.integers(len(pool)))])
                token = token_of[src].pop(w)
                emit(src, day, w, recipient, token)
                holdings[src].discard(w)
                held_by[w].discard(src)
                holdings[src].add(recipient)
                held_by[recipient].add(src)
                token_of[src][recipient] = token
                mint(dst, day, w)
                migrations[day, src, dst] += 1

        holder_counts[:, day] = [len(holdings[j]) for j in range(n)]

    _write_outputs(config, rng, transfers_rows, holder_counts, migrations, out_dir)
    return SimGroundTruth(config=config, project_ids=config.project_ids,
                          migrations=migrations, holder_counts=holder_counts)


def _popularity_value(config, proj, age, noise):
    pop = config.popularity
    level = pop.base[proj] * math.exp(-pop.decay[proj] * (age - 1.0))
    level += pop.boost_amp[proj] * 0.5 * (1.0 + math.sin(2.0 * math.pi * (age - 1.0)
                                                         / pop.boost_period[proj]))
    return max(level + noise, 0.0)


def _write_outputs(config, rng, transfers_rows, holder_counts, migrations, out_dir):
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    n = config.n_projects

    with open(root / "projects.csv", "w") as f:
        f.write("contract,name,hashtag,launch_date\n")
        for i in range(n):
            launch = config.sim_start + timedelta(days=config.launch_schedule[i])
            f.write(f"{sim_contract(i)},Sim Project {i},#sim{i},{launch.isoformat()}\n")

    with open(root / "transfers.csv", "w") as f:
        f.write("contract,timestamp,from,to,token_id\n")
        for row in transfers_rows:
            f.write(",".join(str(v) for v in row) + "\n")

    daily_transfers = np.zeros((n, config.n_days), dtype=np.int64)
    pindex = {sim_contract(i): i for i in range(n)}
    for row in transfers_rows:
        day = (date.fromisoformat(row[1][:10]) - config.sim_start).days
        daily_transfers[pindex[row[0]], day] += 1

    with open(root / "daily_stats.csv", "w") as f:
        f.write("contract,date,floor_price,sales_volume,whale_count\n")
        for i in range(n):
            for day in range(config.launch_schedule[i], config.n_days):
                d = config.sim_start + timedelta(days=day)
                holders = int(holder_counts[i, day])
                floor = 0.05 + 0.002 * holders + 0.01 * float(rng.random())
                volume = floor * float(daily_transfers[i, day])
                whales = holders // 50
                f.write(f"{sim_contract(i)},{d.isoformat()},{floor:.6f},{volume:.6f},{whales}\n")

    with open(root / "social.csv", "w") as f:
        f.write("contract,date,retweets,replies,likes,quotes,sentiment\n")
        for i in range(n):
            for day in range(config.launch_schedule[i], config.n_days):
                d = config.sim_start + timedelta(days=day)
                age = day - config.launch_schedule[i] + 1
                noise = float(rng.normal(0.0, config.popularity.noise)) if config.popularity.noise else 0.0
                level = _popularity_value(config, i, age, noise)
                total = int(round(level))
                likes = int(round(0.6 * total))
                retweets = int(round(0.2 * total))
                replies = int(round(0.1 * total))
                quotes = max(total - likes - retweets - replies, 0)
                sentiment = max(-1.0, min(1.0, 0.3 * math.sin(0.21 * day + i)
                                          + 0.1 * float(rng.normal())))
                f.write(f"{sim_contract(i)},{d.isoformat()},{retweets},{replies},"
                        f"{likes},{quotes},{sentiment:.4f}\n")

    with open(root / "ground_truth.csv", "w") as f:
        f.write("day,source,target,migrants\n")
        for day in range(config.n_days):
            for i in range(n):
                for j in range(n):
                    count = int(migrations[day, i, j])
                    if count:
                        f.write(f"{(config.sim_start + timedelta(days=day)).isoformat()},"
                                f"{sim_contract(i)},{sim_contract(j)},{count}\n")

    with open(root / "config.txt", "w") as f:
        f.write(config_echo(config))


def config_echo(config: SimConfig) -> str:
    """Plain key=value rendering of a config, lists fully expanded."""
    lam = config.true_lambda
    lines = [
        "# substrace simulator config",
        f"n_projects = {config.n_projects}",
        f"n_wallets = {config.n_wallets}",
        f"n_days = {config.n_days}",
        f"seed = {config.seed}",
        f"migration_scale = {float(config.migration_scale)!r}",
        f"collector_fraction = {float(config.collector_fraction)!r}",
        f"init_mode = {config.init_mode}",
        f"sim_start = {config.sim_start.isoformat()}",
        "launch_days = " + ",".join(str(d) for d in config.launch_schedule),
        "init_holders = " + ",".join(str(d) for d in config.init_holders),
        "pop_base = " + ",".join(repr(float(v)) for v in config.popularity.base),
        "pop_decay = " + ",".join(repr(float(v)) for v in config.popularity.decay),
        "pop_boost_amp = " + ",".join(repr(float(v)) for v in config.popularity.boost_amp),
        "pop_boost_period = " + ",".join(repr(float(v)) for v in config.popularity.boost_period),
        f"pop_noise = {float(config.popularity.noise)!r}",
    ]
    for i in range(config.n_projects):
        lines.append(f"lambda_row_{i} = " + ",".join(repr(float(v)) for v in lam[i]))
    return "\n".join(lines) + "\n"


def _broadcast(raw: str, n: int, cast):
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    if len(parts) == 1:
        return tuple(cast(parts[0]) for _ in range(n))
    if len(parts) != n:
        raise InvalidValue(f"expected 1 or {n} values, got {len(parts)}: {raw!r}")
    return tuple(cast(p) for p in parts)


def parse_config(text: str) -> SimConfig:
    """Parse the key=value config format (see config_echo for the full key set).

    ``lambda`` accepts ``uniform:<v>`` or ``random:<lo>:<hi>`` (drawn from the
    run seed); explicit ``lambda_row_<i>`` lines override either.
    """
    entries: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InvalidValue(f"config line {lineno}: expected key = value")
        key, _, value = line.partition("=")
        entries[key.strip().lower()] = value.strip()

    def need(key):
        if key not in entries:
            raise InvalidValue(f"config is missing {key!r}")
        return entries[key]

    n = int(need("n_projects"))
    n_wallets = int(need("n_wallets"))
    n_days = int(need("n_days"))
    seed = int(entries.get("seed", "0"))

    lam = np.zeros((n, n))
    spec = entries.get("lambda", "")
    if spec:
        kind, _, rest = spec.partition(":")
        if kind == "uniform":
            lam = np.full((n, n), float(rest))
        elif kind == "random":
            lo, _, hi = rest.partition(":")
            lam_rng = np.random.default_rng(seed)
            upper = lam_rng.uniform(float(lo), float(hi), size=(n, n))
            lam = np.triu(upper, 1)
            lam = lam + lam.T
        else:
            raise InvalidValue(f"unknown lambda spec {spec!r}")
        np.fill_diagonal(lam, 0.0)
    for i in range(n):
        key = f"lambda_row_{i}"
        if key in entries:
            lam[i] = _broadcast(entries[key], n, float)
    lam = (lam + lam.T) / 2 if not np.allclose(lam, lam.T) else lam
    np.fill_diagonal(lam, 0.0)

    popularity = PopularityProcess(
        base=_broadcast(entries.get("pop_base", "40"), n, float),
        decay=_broadcast(entries.get("pop_decay", "0.01"), n, float),
        boost_amp=_broadcast(entries.get("pop_boost_amp", "10"), n, float),
        boost_period=_broadcast(entries.get("pop_boost_period", "30"), n, float),
        noise=float(entries.get("pop_noise", "0")),
    )
    kwargs = {}
    if "init_holders" in entries:
        kwargs["init_holders"] = _broadcast(entries["init_holders"], n, int)
    if "collector_fraction" in entries:
        kwargs["collector_fraction"] = float(entries["collector_fraction"])
    if "init_mode" in entries:
        kwargs["init_mode"] = entries["init_mode"]
    if "sim_start" in entries:
        kwargs["sim_start"] = date.fromisoformat(entries["sim_start"])
    return SimConfig(
        n_projects=n, n_wallets=n_wallets, n_days=n_days,
        launch_schedule=_broadcast(entries.get("launch_days", "0"), n, int),
        true_lambda=lam, popularity=popularity,
        migration_scale=float(need("migration_scale")), seed=seed, **kwargs,
    )


def desk_config(n_projects: int = 10, n_wallets: int = 2000, n_days: int = 120,
                seed: int = 42) -> SimConfig:
    """The desk-scale reference market used by tests and examples.

    Traders start in disjoint per-project cohorts and a migration swaps the
    single held project, so seller/buyer co-occurrences stay attributable to
    true migrations; the wide propensity band keeps pair counts well above
    binomial noise in rank terms.
    """
    rng = np.random.default_rng(seed)
    upper = rng.uniform(0.1, 0.9, size=(n_projects, n_projects))
    lam = np.triu(upper, 1)
    lam = lam + lam.T
    launches = tuple(range(n_projects))
    popularity = PopularityProcess(
        base=(40.0,) * n_projects,
        decay=(0.012,) * n_projects,
        boost_amp=(12.0,) * n_projects,
        boost_period=(30.0,) * n_projects,
        noise=1.5,
    )
    per_project = max((n_wallets * 3 // 4) // n_projects, 1)
    return SimConfig(
        n_projects=n_projects, n_wallets=n_wallets, n_days=n_days,
        launch_schedule=launches, true_lambda=lam, popularity=popularity,
        migration_scale=1e-4, seed=seed, init_holders=(per_project,) * n_projects,
        init_mode="disjoint",
    )


@dataclass(frozen=True)
class RecoveryReport:
    pooled: float
    per_source: dict[str, float | None]
    n_pairs: int


def evaluate_recovery(ground_truth: SimGroundTruth, estimated: PairMatrix) -> RecoveryReport:
    """Spearman rank agreement between true migrant counts and estimated rates.

    Pairs are ordered (i, j) over the projects present in the estimate;
    per-source coefficients are reported where at least three destination
    pairs exist and both series vary.
    """
    truth = ground_truth.cumulative_migrants()
    pindex = {pid: k for k, pid in enumerate(ground_truth.project_ids)}
    missing = [p for p in estimated.projects if p not in pindex]
    if missing:
        raise InvalidValue(f"estimate covers unknown projects: {missing}")
    n = len(estimated.projects)
    true_vals, est_vals = [], []
    per_source: dict[str, float | None] = {}
    for a, pa in enumerate(estimated.projects):
        row_true, row_est = [], []
        for b, pb in enumerate(estimated.projects):
            if a == b:
                continue
            t = float(truth[pindex[pa], pindex[pb]])
            e = float(estimated.values[a, b])
            true_vals.append(t)
            est_vals.append(e)
            row_true.append(t)
            row_est.append(e)
        if len(row_true) >= 3:
            rho = spearman_correlation(row_true, row_est)
            per_source[pa] = None if rho.degenerate else rho.value
        else:
            per_source[pa] = None
    if len(true_vals) < 3:
        raise InsufficientPairs(f"{len(true_vals)} ordered pairs; need at least 3")
    pooled = spearman_correlation(true_vals, est_vals)
    return RecoveryReport(pooled=pooled.value, per_source=per_source,
                          n_pairs=len(true_vals))
