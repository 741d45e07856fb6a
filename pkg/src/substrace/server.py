"""HTTP JSON API over an immutable dataset snapshot.

Responses are serialized through one canonical encoder (sorted keys, compact
separators) and cached by request digest, so identical analysis requests
return byte-identical bodies. The dataset is loaded once and never mutated;
swapping datasets means building a new app state, which readers observe
atomically.
"""

from __future__ import annotations

import hashlib
import json
import threading
from collections import OrderedDict
from datetime import date

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from .attributes import ATTRIBUTE_REGISTRY, attribute_vectors
from .clustering import Method, gmm, kmeans
from .core import TimeWindow
from .dataset import Dataset, load_dataset
from .errors import (
    EmptyWindow,
    InsufficientProjects,
    InvalidK,
    InvalidValue,
    InvalidWindow,
    NoAttributes,
    NotAlive,
    NotFound,
    SamePair,
    ServiceNotReady,
    SubstraceError,
    UnknownAttribute,
)
from .flowgraph import build_graph, serialize_graph
from .ingest.stats import pearson_correlation
from .mechanisms import compute_daily_panel, compute_window_scores

HISTOGRAM_BINS = 10

_STATUS = {
    "NotFound": 404,
    "ServiceNotReady": 503,
}
_BAD_REQUEST = {
    "EmptyWindow", "InvalidWindow", "InvalidK", "TooManyClusters",
    "UnknownAttribute", "NoAttributes", "InsufficientProjects", "NotAlive",
    "SamePair", "InvalidValue", "EmptyInput", "ShapeError",
}


def canonical_json(payload) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"),
                      allow_nan=False).encode("utf-8")


def _status_for(exc: SubstraceError) -> int:
    if exc.code in _STATUS:
        return _STATUS[exc.code]
    if exc.code in _BAD_REQUEST:
        return 400
    return 500


class _LRU:
    def __init__(self, maxsize=128):
        self._data: OrderedDict[str, bytes] = OrderedDict()
        self._lock = threading.Lock()
        self._maxsize = maxsize

    def get(self, key):
        with self._lock:
            if key in self._data:
                self._data.move_to_end(key)
                return self._data[key]
        return None

    def put(self, key, value):
        with self._lock:
            self._data[key] = value
            self._data.move_to_end(key)
            while len(self._data) > self._maxsize:
                self._data.popitem(last=False)


def parse_window(raw) -> TimeWindow:
    """Accept {"start": ..., "end": ...} or the CLI's "start:end" form."""
    try:
        if isinstance(raw, str):
            start_s, _, end_s = raw.partition(":")
            return TimeWindow(date.fromisoformat(start_s), date.fromisoformat(end_s))
        if isinstance(raw, dict):
            return TimeWindow(date.fromisoformat(raw["start"]),
                              date.fromisoformat(raw["end"]))
    except (KeyError, ValueError, TypeError) as exc:
        raise InvalidWindow(f"unparseable window {raw!r}: {exc}") from None
    raise InvalidWindow(f"unparseable window {raw!r}")


def normalize_analysis_request(body: dict) -> dict:
    """Validate and fill defaults; the result is the cache key material."""
    if not isinstance(body, dict):
        raise InvalidValue("request body must be a JSON object")
    if "window" not in body:
        raise InvalidWindow("request is missing 'window'")
    window = parse_window(body["window"])
    attributes = body.get("attributes") or sorted(ATTRIBUTE_REGISTRY)
    if not isinstance(attributes, list) or not attributes:
        raise NoAttributes("attributes must be a non-empty list")
    for name in attributes:
        if name not in ATTRIBUTE_REGISTRY:
            raise UnknownAttribute(f"unknown attribute {name!r}")
    method = str(body.get("method", "kmeans")).lower()
    if method not in (Method.KMEANS.value, Method.GMM.value):
        raise InvalidValue(f"method must be kmeans or gmm, got {method!r}")
    k = int(body.get("k", 6))
    if not 2 <= k <= 10:
        raise InvalidK(f"k={k} outside [2, 10]")
    seed = int(body.get("seed", 0))
    edge_threshold = int(body.get("edge_threshold", 0))
    if edge_threshold < 0:
        raise InvalidValue("edge_threshold must be non-negative")
    return {
        "window": {"start": window.start.isoformat(), "end": window.end.isoformat()},
        "attributes": list(attributes),
        "method": method,
        "k": k,
        "seed": seed,
        "edge_threshold": edge_threshold,
    }


def run_analysis(dataset: Dataset, request: dict) -> dict:
    """Mechanisms -> clustering -> graph for a normalized request."""
    window = parse_window(request["window"])
    attributes = request["attributes"]
    scores = compute_window_scores(dataset, window, attributes)
    k = min(request["k"], len(scores.projects))
    vectors = attribute_vectors(dataset, window, attributes, scores.projects)
    cluster_fn = kmeans if request["method"] == Method.KMEANS.value else gmm
    clusters = cluster_fn(vectors, k=k, seed=request["seed"])
    graph = build_graph(dataset, window, clusters, scores,
                        edge_threshold=request["edge_threshold"])

    edges = np.linspace(0.0, 1.0, HISTOGRAM_BINS + 1)
    histograms = {}
    metric_values = {
        "recency": [s.recency for s in scores.scores],
        "pa": [s.global_pa for s in scores.scores],
        "propensity": [s.propensity for s in scores.scores],
        "impact": [s.impact for s in scores.scores],
    }
    groups = [clusters.assignments[p] for p in scores.projects]
    for name, values in metric_values.items():
        counts, _ = np.histogram(values, bins=edges)
        group_counts = []
        for g in range(clusters.k):
            sub = [v for v, gg in zip(values, groups) if gg == g]
            gc, _ = np.histogram(sub, bins=edges)
            group_counts.append([int(c) for c in gc])
        histograms[name] = {
            "bin_edges": [float(e) for e in edges],
            "counts": [int(c) for c in counts],
            "group_counts": group_counts,
        }

    pcp = [
        {
            "project": s.project,
            "group": clusters.assignments[s.project],
            "recency": s.recency,
            "pa": s.global_pa,
            "propensity": s.propensity,
            "impact": s.impact,
        }
        for s in scores.scores
    ]

    return {
        "request": request,
        "projects": list(scores.projects),
        "alive": list(scores.alive),
        "scores": [
            {
                "project": s.project,
                "recency_raw": s.recency_raw, "recency": s.recency,
                "pa_raw": s.global_pa_raw, "pa": s.global_pa,
                "propensity_raw": s.propensity_raw, "propensity": s.propensity,
                "impact_raw": s.impact_raw, "impact": s.impact,
            }
            for s in scores.scores
        ],
        "clusters": {
            "method": clusters.method.value,
            "k": clusters.k,
            "seed": clusters.seed,
            "assignments": dict(sorted(clusters.assignments.items())),
            "group_order": list(clusters.group_order),
            "sizes": clusters.sizes(),
            "iterations_run": clusters.iterations_run,
            "converged": clusters.converged,
        },
        "graph": serialize_graph(graph),
        "histograms": histograms,
        "pcp": pcp,
    }


def _evolution_block(panel, pid, dataset, d0, d1):
    k = panel.row(pid)
    days = [dataset.date_of(d).isoformat() for d in range(d0, d1 + 1)]
    as_list = lambda arr: [float(v) for v in arr]
    return {
        "project": pid,
        "days": days,
        "buyers": [int(v) for v in panel.buyers[k]],
        "sellers": [int(v) for v in panel.sellers[k]],
        "holders": [int(v) for v in panel.holders[k]],
        "mechanisms": {
            "recency": {"raw": as_list(panel.recency_raw[k]),
                        "normalized": as_list(panel.recency[k])},
            "pa": {"raw": as_list(panel.pa_raw[k]),
                   "normalized": as_list(panel.pa[k])},
            "propensity": {"raw": as_list(panel.propensity_raw[k]),
                           "normalized": as_list(panel.propensity[k])},
            "impact": {"raw": as_list(panel.impact_raw[k]),
                       "normalized": as_list(panel.impact[k])},
        },
    }


class AppState:
    def __init__(self, dataset: Dataset | None):
        self.dataset = dataset
        self.analysis_cache = _LRU(maxsize=128)
        self.panel_cache = _LRU(maxsize=16)

    def require_dataset(self) -> Dataset:
        if self.dataset is None:
            raise ServiceNotReady("no dataset loaded")
        return self.dataset

    def panel(self, window: TimeWindow, attributes: tuple[str, ...]):
        key = canonical_json({"w": [window.start.isoformat(), window.end.isoformat()],
                              "a": list(attributes)}).decode()
        cached = self.panel_cache.get(key)
        if cached is None:
            cached = compute_daily_panel(self.require_dataset(), window, attributes)
            self.panel_cache.put(key, cached)
        return cached


def create_app(data_dir=None, dataset: Dataset | None = None) -> FastAPI:
    if dataset is None and data_dir is not None:
        dataset = load_dataset(data_dir)
    state = AppState(dataset)
    app = FastAPI(title="substrace", docs_url=None, redoc_url=None)
    app.state.substrace = state
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])

    def json_response(payload, status=200):
        return Response(content=canonical_json(payload), status_code=status,
                        media_type="application/json")

    @app.exception_handler(SubstraceError)
    async def substrace_error(_request: Request, exc: SubstraceError):
        return json_response({"error": exc.code, "message": str(exc)},
                             status=_status_for(exc))

    @app.get("/api/projects")
    def projects():
        ds = state.require_dataset()
        span_start, span_end = 0, ds.end_day
        alive = ds.alive_mask(span_start, span_end)
        return json_response({
            "span": {"start": ds.epoch.isoformat(),
                     "end": ds.date_of(ds.end_day).isoformat()},
            "projects": [
                {
                    "contract": p.id,
                    "name": p.name,
                    "hashtag": p.twitter_hashtag,
                    "launch_date": p.launch_date.isoformat(),
                    "alive": bool(alive[i]),
                }
                for i, p in enumerate(ds.projects)
            ],
        })

    @app.post("/api/analysis")
    async def analysis(request: Request):
        ds = state.require_dataset()
        try:
            body = await request.json()
        except Exception:
            raise InvalidValue("request body is not valid JSON") from None
        normalized = normalize_analysis_request(body)
        key = canonical_json(normalized).decode()
        digest = hashlib.sha256(key.encode()).hexdigest()
        cached = state.analysis_cache.get(digest)
        if cached is None:
            cached = canonical_json(run_analysis(ds, normalized))
            state.analysis_cache.put(digest, cached)
        return Response(content=cached, media_type="application/json")

    def _window_and_attrs(window: str, attrs: str | None):
        win = parse_window(window)
        attributes = tuple(a for a in (attrs or "").split(",") if a) \
            or tuple(sorted(ATTRIBUTE_REGISTRY))
        for name in attributes:
            if name not in ATTRIBUTE_REGISTRY:
                raise UnknownAttribute(f"unknown attribute {name!r}")
        return win, attributes

    def _check_alive(ds, pid, window):
        if pid not in ds.project_ids:
            raise NotFound(f"unknown project {pid}")
        d0, d1 = ds.window_range(window)
        if not ds.alive_mask(d0, d1)[ds.index_of(pid)]:
            raise NotAlive(f"{pid} is not alive in {window.start}..{window.end}")

    @app.get("/api/pair")
    def pair(a: str, b: str, window: str, attrs: str | None = None):
        ds = state.require_dataset()
        if a == b:
            raise SamePair("pair endpoints need two distinct projects")
        win, attributes = _window_and_attrs(window, attrs)
        _check_alive(ds, a, win)
        _check_alive(ds, b, win)
        d0, d1 = ds.window_range(win)
        panel = state.panel(win, attributes)
        for pid in (a, b):
            if pid not in panel.projects:
                raise NotAlive(f"{pid} has no holders in the window")

        roles = {}
        for pid in (a, b):
            rp = ds.role_project(ds.index_of(pid))
            roles[pid] = {
                "buyers": set(ds.role.buyers_union(rp, d0, d1).tolist()) if rp is not None else set(),
                "sellers": set(ds.role.sellers_union(rp, d0, d1).tolist()) if rp is not None else set(),
                "holders": set(ds.role.holders_within(rp, d0, d1).tolist()) if rp is not None else set(),
            }
        co_occurrence = {
            role: len(roles[a][role] & roles[b][role])
            for role in ("buyers", "sellers", "holders")
        }
        ka, kb = panel.row(a), panel.row(b)
        correlations = {}
        for role, series in (("buyers", panel.buyers), ("sellers", panel.sellers),
                             ("holders", panel.holders)):
            r = pearson_correlation(series[ka].tolist(), series[kb].tolist())
            correlations[role] = {"value": r.value, "degenerate": r.degenerate}
        return json_response({
            "window": {"start": win.start.isoformat(), "end": win.end.isoformat()},
            "pair": [a, b],
            "co_occurrence": co_occurrence,
            "correlations": correlations,
            "evolution": {
                a: _evolution_block(panel, a, ds, d0, d1),
                b: _evolution_block(panel, b, ds, d0, d1),
            },
        })

    @app.get("/api/evolution")
    def evolution(project: str, window: str, attrs: str | None = None):
        ds = state.require_dataset()
        win, attributes = _window_and_attrs(window, attrs)
        _check_alive(ds, project, win)
        d0, d1 = ds.window_range(win)
        panel = state.panel(win, attributes)
        if project not in panel.projects:
            raise NotAlive(f"{project} has no holders in the window")
        return json_response(_evolution_block(panel, project, ds, d0, d1))

    return app
