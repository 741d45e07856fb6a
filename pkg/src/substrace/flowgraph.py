"""Substitution-wheel graph assembly for one analysis window.

Nodes carry undistorted barycentric coordinates inside the reference
equilateral triangle (buyer vertex at the origin, seller vertex at
(side, 0), holder vertex at the apex); fisheye / square-sparse distortions
are a client-side concern. Dead or unlaunched projects stay in the node list
flagged ``alive: false`` so the outer ring always shows the full sampled
universe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .clustering import ClusterResult
from .core import ProjectId, TimeWindow
from .dataset import Dataset
from .errors import InvalidBarycentric, NotFound, StaleInput
from .mechanisms import WindowScores

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class TriangleCoord:
    b: float
    s: float
    h: float
    x: float
    y: float


@dataclass(frozen=True)
class FlowEdge:
    source: ProjectId
    target: ProjectId
    migrated_count: int
    p_mutual: float
    pi_rate: float


@dataclass(frozen=True)
class GraphNode:
    project: ProjectId
    group: int | None
    coord: TriangleCoord
    holder_count: int
    alive: bool
    pie: tuple[float, float, float]          # buyer/seller/holder fractions
    arcs: dict[str, float]                   # normalized mechanism scores


@dataclass(frozen=True)
class GroupArc:
    group: int
    size: int
    start: float    # fraction of the full circle, clockwise from 12 o'clock
    end: float


@dataclass(frozen=True)
class SubstitutionGraph:
    window: TimeWindow
    nodes: tuple[GraphNode, ...]
    edges: tuple[FlowEdge, ...]
    ring: tuple[ProjectId, ...]              # holder count descending
    group_arcs: tuple[GroupArc, ...]

    def node(self, pid: ProjectId) -> GraphNode:
        for n in self.nodes:
            if n.project == pid:
                return n
        raise NotFound(f"project {pid} not in graph")


def barycentric_project(b: float, s: float, h: float,
                        side_length: float = 1.0) -> tuple[float, float]:
    """Map a unit-sum (b, s, h) triple into the reference triangle."""
    if side_length <= 0:
        raise InvalidBarycentric(f"side length {side_length} must be positive")
    if min(b, s, h) < 0 or abs(b + s + h - 1.0) > 1e-6:
        raise InvalidBarycentric(f"({b}, {s}, {h}) is not a barycentric triple")
    x = s * side_length + h * side_length / 2.0
    y = h * side_length * SQRT3 / 2.0
    return x, y


CENTROID = (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)


def _window_fractions(dataset: Dataset, pid: ProjectId, d0: int, d1: int):
    """Window-union role fractions with buyer > seller > pure-holder priority."""
    i = dataset.index_of(pid)
    rp = dataset.role_project(i)
    if rp is None:
        return CENTROID
    buyers = set(dataset.role.buyers_union(rp, d0, d1).tolist())
    sellers = set(dataset.role.sellers_union(rp, d0, d1).tolist()) - buyers
    holders = set(dataset.role.holders_within(rp, d0, d1).tolist()) - buyers - sellers
    total = len(buyers) + len(sellers) + len(holders)
    if total == 0:
        return CENTROID  # blank day: display at the triangle center
    return len(buyers) / total, len(sellers) / total, len(holders) / total


def build_graph(dataset: Dataset, window: TimeWindow, clusters: ClusterResult,
                scores: WindowScores, edge_threshold: int = 0) -> SubstitutionGraph:
    """Assemble nodes, flow edges, ring order, and group arcs for a window."""
    if scores.window != window:
        raise StaleInput("scores were computed for a different window")
    if set(clusters.assignments) != set(scores.projects):
        raise StaleInput("cluster result covers a different project set")
    d0, d1 = dataset.window_range(window)

    scored = {pid: k for k, pid in enumerate(scores.projects)}
    score_by_pid = {s.project: s for s in scores.scores}
    alive = set(scores.alive)

    nodes = []
    for p in dataset.projects:
        pid = p.id
        rp = dataset.role_project(dataset.index_of(pid))
        holder_count = (len(dataset.role.holders_within(rp, d0, d1))
                        if rp is not None else 0)
        if pid in scored:
            b, s, h = _window_fractions(dataset, pid, d0, d1)
            sc = score_by_pid[pid]
            arcs = {"recency": sc.recency, "pa": sc.global_pa,
                    "propensity": sc.propensity, "impact": sc.impact}
            group: int | None = clusters.assignments[pid]
        else:
            b, s, h = CENTROID
            arcs = {"recency": 0.0, "pa": 0.0, "propensity": 0.0, "impact": 0.0}
            group = None
        x, y = barycentric_project(b, s, h)
        nodes.append(GraphNode(
            project=pid, group=group, coord=TriangleCoord(b, s, h, x, y),
            holder_count=holder_count, alive=pid in alive,
            pie=(b, s, h), arcs=arcs,
        ))

    edges = []
    n = len(scores.projects)
    for a in range(n):
        for b_ in range(n):
            if a == b_:
                continue
            migrated = int(scores.migrated[a, b_])
            if migrated > edge_threshold:
                edges.append(FlowEdge(
                    source=scores.projects[a], target=scores.projects[b_],
                    migrated_count=migrated,
                    p_mutual=float(scores.p_matrix.values[a, b_]),
                    pi_rate=float(scores.pi_matrix.values[a, b_]),
                ))

    ring = tuple(n_.project for n_ in sorted(
        nodes, key=lambda n_: (-n_.holder_count, n_.project)))

    group_arcs = _group_arcs(clusters, scored)
    return SubstitutionGraph(window=window, nodes=tuple(nodes), edges=tuple(edges),
                             ring=ring, group_arcs=group_arcs)


def _group_arcs(clusters: ClusterResult, scored) -> tuple[GroupArc, ...]:
    sizes = {g: 0 for g in range(clusters.k)}
    for pid in scored:
        sizes[clusters.assignments[pid]] += 1
    total = sum(sizes.values())
    arcs = []
    cursor = 0.0
    for g in clusters.group_order:
        if sizes.get(g, 0) == 0:
            continue
        span = sizes[g] / total
        arcs.append(GroupArc(group=g, size=sizes[g], start=cursor, end=cursor + span))
        cursor += span
    return tuple(arcs)


def _subgraph(graph: SubstitutionGraph, keep: set[ProjectId],
              edge_keep) -> SubstitutionGraph:
    nodes = tuple(n for n in graph.nodes if n.project in keep)
    edges = tuple(e for e in graph.edges if edge_keep(e))
    ring = tuple(p for p in graph.ring if p in keep)
    sizes: dict[int, int] = {}
    for n in nodes:
        if n.group is not None:
            sizes[n.group] = sizes.get(n.group, 0) + 1
    total = sum(sizes.values())
    arcs = []
    cursor = 0.0
    for arc in graph.group_arcs:
        if arc.group in sizes:
            span = sizes[arc.group] / total
            arcs.append(GroupArc(arc.group, sizes[arc.group], cursor, cursor + span))
            cursor += span
    return SubstitutionGraph(window=graph.window, nodes=nodes, edges=edges,
                             ring=ring, group_arcs=tuple(arcs))


def group_filter(graph: SubstitutionGraph, group_index: int) -> SubstitutionGraph:
    """Induced subgraph on one group's members, orderings recomputed."""
    members = {n.project for n in graph.nodes if n.group == group_index}
    if not members:
        raise NotFound(f"group {group_index} has no members in this graph")
    return _subgraph(graph, members,
                     lambda e: e.source in members and e.target in members)


def ego_network(graph: SubstitutionGraph, project: ProjectId) -> SubstitutionGraph:
    """The project plus every node sharing an edge with it, incident edges only."""
    if all(n.project != project for n in graph.nodes):
        raise NotFound(f"project {project} not in graph")
    incident = [e for e in graph.edges if project in (e.source, e.target)]
    keep = {project}
    for e in incident:
        keep.add(e.source)
        keep.add(e.target)
    return _subgraph(graph, keep, lambda e: project in (e.source, e.target))


def serialize_graph(graph: SubstitutionGraph) -> dict:
    """JSON payload with the documented field names."""
    return {
        "window": {"start": graph.window.start.isoformat(),
                   "end": graph.window.end.isoformat()},
        "nodes": [
            {
                "project": n.project,
                "group": n.group,
                "b": n.coord.b, "s": n.coord.s, "h": n.coord.h,
                "x": n.coord.x, "y": n.coord.y,
                "holders": n.holder_count,
                "alive": n.alive,
                "glyph": {"pie": list(n.pie), "arcs": n.arcs},
            }
            for n in graph.nodes
        ],
        "edges": [
            {
                "source": e.source, "target": e.target,
                "migrated": e.migrated_count, "p": e.p_mutual, "pi": e.pi_rate,
            }
            for e in graph.edges
        ],
        "ring": list(graph.ring),
        "group_arcs": [
            {"group": a.group, "size": a.size, "start": a.start, "end": a.end}
            for a in graph.group_arcs
        ],
    }
