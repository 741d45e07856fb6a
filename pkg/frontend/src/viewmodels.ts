/** Pure builders turning (ViewState, AnalysisResponse) into render-ready
 * view models. Everything here is deterministic and side-effect free; the
 * renderers only translate these structures into SVG.
 */

import { fisheye, squareSparse, type Point } from "./distortion.js";
import type { ViewState } from "./state.js";
import type {
  AnalysisResponse,
  EvolutionSeries,
  GraphEdge,
  GraphNode,
  Histogram,
  MechanismKey,
  PairResponse,
  PcpRow,
} from "./types.js";
import { MECHANISM_KEYS } from "./types.js";

export const GROUP_PALETTE = [
  "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1",
  "#76b7b2", "#edc948", "#9c755f", "#bab0ac", "#d37295",
];

export function groupColor(group: number | null): string {
  return group === null ? "#cccccc" : GROUP_PALETTE[group % GROUP_PALETTE.length];
}

// --- propensity analysis view (control panel + grouped project list) --------

export interface ProjectRow {
  project: string;
  group: number;
  propensity: number;
  recency: number;
  pa: number;
  impact: number;
}

export interface GroupSection {
  group: number;
  color: string;
  count: number;
  rows: ProjectRow[];
}

/** Groups ordered by the server's size-descending order; rows by project id. */
export function buildProjectList(response: AnalysisResponse): GroupSection[] {
  const byGroup = new Map<number, ProjectRow[]>();
  for (const s of response.scores) {
    const group = response.clusters.assignments[s.project];
    const row: ProjectRow = {
      project: s.project,
      group,
      propensity: s.propensity,
      recency: s.recency,
      pa: s.pa,
      impact: s.impact,
    };
    if (!byGroup.has(group)) byGroup.set(group, []);
    byGroup.get(group)!.push(row);
  }
  const sections: GroupSection[] = [];
  for (const group of response.clusters.group_order) {
    const rows = (byGroup.get(group) ?? []).sort((a, b) =>
      a.project < b.project ? -1 : 1,
    );
    if (rows.length) {
      sections.push({ group, color: groupColor(group), count: rows.length, rows });
    }
  }
  return sections;
}

// --- mechanisms analysis view (quadrant histograms + PCP) --------------------

export interface HistogramVM {
  metric: MechanismKey;
  binEdges: number[];
  counts: number[];          // full distribution
  highlighted: number[];     // selected group only (all groups when none)
}

export function buildHistograms(
  response: AnalysisResponse,
  selectedGroup: number | null,
): HistogramVM[] {
  return MECHANISM_KEYS.map((metric) => {
    const hist: Histogram = response.histograms[metric];
    const highlighted =
      selectedGroup === null
        ? hist.counts.slice()
        : hist.group_counts[selectedGroup].slice();
    return {
      metric,
      binEdges: hist.bin_edges.slice(),
      counts: hist.counts.slice(),
      highlighted,
    };
  });
}

/** Recompute a histogram client-side from the normalized scores. */
export function recountHistogram(
  response: AnalysisResponse,
  metric: MechanismKey,
  group: number | null = null,
): number[] {
  const hist = response.histograms[metric];
  const edges = hist.bin_edges;
  const counts = new Array<number>(edges.length - 1).fill(0);
  for (const s of response.scores) {
    if (group !== null && response.clusters.assignments[s.project] !== group) continue;
    const v = s[metric];
    let bin = Math.floor(v * (edges.length - 1));
    if (bin >= counts.length) bin = counts.length - 1; // 1.0 falls in the last bin
    counts[bin] += 1;
  }
  return counts;
}

export interface Polyline {
  project: string;
  group: number;
  color: string;
  values: Record<MechanismKey, number>;
  emphasized: boolean;
  dimmed: boolean;
}

export function buildPcp(
  response: AnalysisResponse,
  selectedGroup: number | null,
  highlightProject: string | null,
): Polyline[] {
  return response.pcp
    .filter((row: PcpRow) => selectedGroup === null || row.group === selectedGroup)
    .map((row) => ({
      project: row.project,
      group: row.group,
      color: groupColor(row.group),
      values: {
        recency: row.recency,
        pa: row.pa,
        propensity: row.propensity,
        impact: row.impact,
      },
      emphasized: highlightProject === row.project,
      dimmed: highlightProject !== null && highlightProject !== row.project,
    }));
}

// --- substitution view (wheel) ------------------------------------------------

export interface WheelNode {
  project: string;
  group: number | null;
  color: string;
  x: number;
  y: number;
  radius: number;
  alive: boolean;
  pie: number[];                       // buyer/seller/holder fractions
  arcs: Record<string, number>;        // normalized mechanism scores
}

export interface WheelEdge {
  source: string;
  target: string;
  width: number;
  migrated: number;
  p: number;
  pi: number;
}

export interface RingSlot {
  project: string;
  start: number;   // fraction of the circle
  end: number;
  holders: number;
  alive: boolean;
  color: string;
}

export interface WheelVM {
  nodes: WheelNode[];
  edges: WheelEdge[];
  ring: RingSlot[];
  groupArcs: { group: number; color: string; start: number; end: number; size: number }[];
}

const NODE_RADIUS_MIN = 4;
const NODE_RADIUS_MAX = 16;
const EDGE_WIDTH_MAX = 6;

/** Scale server coordinates into the viewport and apply the layout mode. */
export function buildWheel(
  response: AnalysisResponse,
  state: ViewState,
  width: number,
  height: number,
): WheelVM {
  let graph = response.graph;
  if (state.selectedGroup !== null) {
    graph = filterGraphByGroup(graph, state.selectedGroup);
  }
  if (state.selectedProject !== null) {
    graph = egoGraph(graph, state.selectedProject);
  }

  const maxHolders = Math.max(1, ...graph.nodes.map((n) => n.holders));
  const scalePoint = (n: GraphNode): Point => ({
    // server coords live in the unit triangle (height sqrt(3)/2)
    x: n.x * width * 0.9 + width * 0.05,
    y: height - (n.y * height * 0.9 + height * 0.05),
  });

  let points = graph.nodes.map(scalePoint);
  if (state.layoutMode === "fisheye") {
    const focusNode = graph.nodes.find((n) => n.project === state.selectedProject);
    const focus = focusNode
      ? scalePoint(focusNode)
      : { x: width / 2, y: height / 2 };
    const radius = Math.min(width, height) / 2;
    points = points.map((p) => fisheye(p, focus, radius));
  } else if (state.layoutMode === "squaresparse") {
    points = squareSparse(points, width, height);
  }

  const nodes: WheelNode[] = graph.nodes.map((n, i) => ({
    project: n.project,
    group: n.group,
    color: groupColor(n.group),
    x: points[i].x,
    y: points[i].y,
    radius:
      NODE_RADIUS_MIN +
      (NODE_RADIUS_MAX - NODE_RADIUS_MIN) * Math.sqrt(n.holders / maxHolders),
    alive: n.alive,
    pie: n.glyph.pie,
    arcs: n.glyph.arcs,
  }));

  const maxMigrated = Math.max(1, ...graph.edges.map((e) => e.migrated));
  const edges: WheelEdge[] = graph.edges.map((e) => ({
    source: e.source,
    target: e.target,
    width: Math.max(0.5, (e.migrated / maxMigrated) * EDGE_WIDTH_MAX),
    migrated: e.migrated,
    p: e.p,
    pi: e.pi,
  }));

  const slice = 1 / Math.max(graph.ring.length, 1);
  const holdersBy = new Map(graph.nodes.map((n) => [n.project, n] as const));
  const ring: RingSlot[] = graph.ring.map((pid, i) => {
    const node = holdersBy.get(pid)!;
    return {
      project: pid,
      start: i * slice,
      end: (i + 1) * slice,
      holders: node.holders,
      alive: node.alive,
      color: node.alive ? groupColor(node.group) : "#ffffff", // white: dead or unlaunched
    };
  });

  return {
    nodes,
    edges,
    ring,
    groupArcs: graph.group_arcs.map((a) => ({
      group: a.group,
      color: groupColor(a.group),
      start: a.start,
      end: a.end,
      size: a.size,
    })),
  };
}

export function filterGraphByGroup(graph: AnalysisResponse["graph"], group: number) {
  const members = new Set(
    graph.nodes.filter((n) => n.group === group).map((n) => n.project),
  );
  const nodes = graph.nodes.filter((n) => members.has(n.project));
  const edges = graph.edges.filter(
    (e: GraphEdge) => members.has(e.source) && members.has(e.target),
  );
  const total = nodes.length || 1;
  return {
    window: graph.window,
    nodes,
    edges,
    ring: graph.ring.filter((p) => members.has(p)),
    group_arcs: graph.group_arcs
      .filter((a) => a.group === group)
      .map((a) => ({ ...a, start: 0, end: nodes.length / total })),
  };
}

export function egoGraph(graph: AnalysisResponse["graph"], project: string) {
  const incident = graph.edges.filter(
    (e) => e.source === project || e.target === project,
  );
  const keep = new Set<string>([project]);
  for (const e of incident) {
    keep.add(e.source);
    keep.add(e.target);
  }
  return {
    window: graph.window,
    nodes: graph.nodes.filter((n) => keep.has(n.project)),
    edges: incident,
    ring: graph.ring.filter((p) => keep.has(p)),
    group_arcs: graph.group_arcs,
  };
}

// --- NFT status glyph (pie + mechanism donut) ----------------------------------

export interface GlyphArc {
  metric: MechanismKey;
  color: string;
  /** arc sweep in radians, proportional to the normalized score */
  angle: number;
  /** start angle of this metric's quadrant */
  start: number;
}

/** Quadrant donut: each mechanism owns a quarter turn; the filled sweep is
 * proportional to its normalized score. */
export function buildGlyphArcs(arcs: Record<string, number>): GlyphArc[] {
  const quarter = Math.PI / 2;
  return MECHANISM_KEYS.map((metric, i) => ({
    metric,
    color: { recency: "#e8863a", pa: "#3f9d5a", propensity: "#3a6fb8", impact: "#c83a3a" }[metric],
    angle: (arcs[metric] ?? 0) * quarter,
    start: i * quarter,
  }));
}

// --- impact dynamic view (set matrix + evolution) --------------------------------

export interface CoGlyphVM {
  pair: [string, string];
  /** rose sector radii scaled to [0, 1] against maxCount */
  sectors: { role: "buyers" | "sellers" | "holders"; value: number; radius: number }[];
  /** correlation donut: sweep proportional to |r|, red positive, blue negative */
  rings: { role: string; value: number; angle: number; color: string }[];
  totalCo: number;
  clickable: boolean;
}

export function buildCoGlyph(pairData: PairResponse, maxCount: number): CoGlyphVM {
  const roles = ["buyers", "sellers", "holders"] as const;
  const denom = Math.max(maxCount, 1);
  const sectors = roles.map((role) => ({
    role,
    value: pairData.co_occurrence[role],
    radius: Math.sqrt(pairData.co_occurrence[role] / denom),
  }));
  const rings = roles.map((role) => {
    const { value } = pairData.correlations[role];
    return {
      role,
      value,
      angle: Math.abs(value) * Math.PI,
      color: value >= 0 ? "#c83a3a" : "#3a6fb8",
    };
  });
  const totalCo = roles.reduce((acc, role) => acc + pairData.co_occurrence[role], 0);
  return {
    pair: pairData.pair,
    sectors,
    rings,
    totalCo,
    clickable: totalCo > 0,
  };
}

export interface EvolutionVM {
  project: string;
  days: string[];
  stackedBars: { day: string; buyers: number; sellers: number; holders: number }[];
  holderArea: number[];
  mechanismLines: { metric: MechanismKey; color: string; values: number[] }[];
  impactScatter: { day: string; value: number }[];
}

export function buildEvolution(series: EvolutionSeries): EvolutionVM {
  return {
    project: series.project,
    days: series.days,
    stackedBars: series.days.map((day, i) => ({
      day,
      buyers: series.buyers[i],
      sellers: series.sellers[i],
      holders: series.holders[i],
    })),
    holderArea: series.holders.slice(),
    mechanismLines: (["recency", "pa", "propensity"] as MechanismKey[]).map(
      (metric) => ({
        metric,
        color: { recency: "#e8863a", pa: "#3f9d5a", propensity: "#3a6fb8", impact: "#c83a3a" }[metric],
        values: series.mechanisms[metric].normalized.slice(),
      }),
    ),
    impactScatter: series.days.map((day, i) => ({
      day,
      value: series.mechanisms.impact.normalized[i],
    })),
  };
}

// --- cross-view consistency (client-side checks the tests exercise) -------------

export function groupSizesFromAssignments(response: AnalysisResponse): number[] {
  const sizes = new Array<number>(response.clusters.k).fill(0);
  for (const pid of response.projects) {
    sizes[response.clusters.assignments[pid]] += 1;
  }
  return sizes;
}
