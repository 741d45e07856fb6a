"""Command-line entry points: ingest, analyze, simulate, fit, serve.

Exit codes: 0 success, 1 usage error, 2 data error. Failures additionally
print one machine-readable JSON line on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .attributes import ATTRIBUTE_REGISTRY
from .core import TimeWindow
from .dataset import load_dataset, write_manifest
from .errors import (
    InvalidK,
    InvalidValue,
    InvalidWindow,
    NoAttributes,
    SubstraceError,
    UnknownAttribute,
)
from .server import canonical_json, normalize_analysis_request, parse_window, run_analysis

USAGE_ERRORS = {
    "InvalidWindow", "InvalidK", "UnknownAttribute", "NoAttributes",
    "TooManyClusters", "InvalidDuration",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _fail("UsageError", message, 1)


def _fail(code: str, message: str, exit_code: int):
    print(json.dumps({"error": code, "message": message}), file=sys.stderr)
    sys.exit(exit_code)


def _data_dir(args) -> str:
    data = args.data or os.environ.get("SUBSTRACE_DATA")
    if not data:
        _fail("UsageError", "no data directory: pass --data or set SUBSTRACE_DATA", 1)
    return data


def _add_data_flag(p):
    p.add_argument("--data", help="dataset directory (default: $SUBSTRACE_DATA)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="substrace",
                     description="substitutive-system analytics over transfer logs")
    parser.add_argument("--version", action="version", version=f"substrace {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="validate a data directory and write its manifest")
    p_ingest.add_argument("data_dir", nargs="?", help="directory with the four CSV files")
    _add_data_flag(p_ingest)

    p_analyze = sub.add_parser("analyze", help="run one analysis request and write the response")
    _add_data_flag(p_analyze)
    p_analyze.add_argument("--window", required=True, help="START:END (ISO dates, inclusive)")
    p_analyze.add_argument("--attrs", help="comma-separated attribute names (default: all)")
    p_analyze.add_argument("--method", choices=["kmeans", "gmm"], default="kmeans")
    p_analyze.add_argument("--k", type=int, default=6)
    p_analyze.add_argument("--seed", type=int, default=0)
    p_analyze.add_argument("--edge-threshold", type=int, default=0)
    p_analyze.add_argument("--out", help="output file (default: stdout)")

    p_sim = sub.add_parser("simulate", help="generate a synthetic market from a config file")
    p_sim.add_argument("--config", required=True, help="key=value config file")
    p_sim.add_argument("--out", required=True, help="output directory")

    p_fit = sub.add_parser("fit", help="fit growth models to every project's holder curve")
    _add_data_flag(p_fit)
    p_fit.add_argument("--model", choices=["bass", "ms", "gompertz", "all"], default="all")
    p_fit.add_argument("--seed", type=int, default=0)
    p_fit.add_argument("--out", help="output CSV (default: stdout)")

    p_serve = sub.add_parser("serve", help="serve the analysis API over HTTP")
    _add_data_flag(p_serve)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8787)
    return parser


def cmd_ingest(args) -> int:
    data = args.data_dir or _data_dir(args)
    dataset = load_dataset(data)
    manifest = write_manifest(data, dataset)
    print(json.dumps({
        "data_dir": str(Path(data)),
        "projects": manifest["projects"],
        "wallets": manifest["wallets"],
        "span": manifest["span"],
        "skipped_transfers": manifest["skipped_transfers"],
        "manifest": str(Path(data) / "manifest.json"),
    }, indent=2, sort_keys=True))
    return 0


def cmd_analyze(args) -> int:
    window = parse_window(args.window)  # raises InvalidWindow on bad input
    request = normalize_analysis_request({
        "window": {"start": window.start.isoformat(), "end": window.end.isoformat()},
        "attributes": [a for a in (args.attrs or "").split(",") if a] or None,
        "method": args.method,
        "k": args.k,
        "seed": args.seed,
        "edge_threshold": args.edge_threshold,
    })
    dataset = load_dataset(_data_dir(args))
    body = canonical_json(run_analysis(dataset, request))
    if args.out:
        Path(args.out).write_bytes(body + b"\n")
    else:
        sys.stdout.write(body.decode() + "\n")
    return 0


def cmd_simulate(args) -> int:
    from .simulator import parse_config, simulate

    text = Path(args.config).read_text()
    config = parse_config(text)
    truth = simulate(config, args.out)
    print(json.dumps({
        "out_dir": str(Path(args.out)),
        "projects": config.n_projects,
        "wallets": config.n_wallets,
        "days": config.n_days,
        "migrations": int(truth.migrations.sum()),
    }, indent=2, sort_keys=True))
    return 0


def cmd_fit(args) -> int:
    from .growthfit import GrowthCurve, ModelKind, fit
    from .errors import InsufficientData
    import numpy as np

    dataset = load_dataset(_data_dir(args))
    models = ([ModelKind(args.model)] if args.model != "all"
              else [ModelKind.BASS, ModelKind.MS, ModelKind.GOMPERTZ])
    lines = ["project,model,param1,param2,param3,r_squared,converged"]
    for p in dataset.projects:
        i = dataset.index_of(p.id)
        rp = dataset.role_project(i)
        if rp is None:
            continue
        launch = int(dataset.launch_day[i])
        days = list(range(launch, dataset.end_day + 1))
        series = [dataset.role.cumulative_holders(rp, d) for d in days]
        t = np.arange(1.0, len(days) + 1.0)
        for model in models:
            try:
                curve = GrowthCurve(t, np.asarray(series, dtype=float))
                result = fit(curve, model, seed=args.seed)
            except InsufficientData:
                continue
            values = [f"{v!r}" for v in result.params.values()]
            while len(values) < 3:
                values.append("")
            lines.append(f"{p.id},{model.value},{values[0]},{values[1]},{values[2]},"
                         f"{result.r_squared!r},{str(result.converged).lower()}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(data_dir=_data_dir(args))
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


_COMMANDS = {
    "ingest": cmd_ingest,
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except SubstraceError as exc:
        _fail(exc.code, str(exc), 1 if exc.code in USAGE_ERRORS else 2)
    except FileNotFoundError as exc:
        _fail("FileNotFound", str(exc), 2)
    except ValueError as exc:
        _fail("ValueError", str(exc), 2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
