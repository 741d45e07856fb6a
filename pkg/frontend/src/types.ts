/** Payload types mirroring the analysis API's documented JSON schemas. */

export interface ProjectInfo {
  contract: string;
  name: string;
  hashtag: string;
  launch_date: string;
  alive: boolean;
}

export interface ProjectsResponse {
  span: { start: string; end: string };
  projects: ProjectInfo[];
}

export interface AnalysisRequest {
  window: string | { start: string; end: string };
  attributes?: string[];
  method?: "kmeans" | "gmm";
  k?: number;
  seed?: number;
  edge_threshold?: number;
}

export interface MechanismScore {
  project: string;
  recency_raw: number;
  recency: number;
  pa_raw: number;
  pa: number;
  propensity_raw: number;
  propensity: number;
  impact_raw: number;
  impact: number;
}

export interface ClusterSummary {
  method: string;
  k: number;
  seed: number;
  assignments: Record<string, number>;
  group_order: number[];
  sizes: number[];
  iterations_run: number;
  converged: boolean;
}

export interface GraphNode {
  project: string;
  group: number | null;
  b: number;
  s: number;
  h: number;
  x: number;
  y: number;
  holders: number;
  alive: boolean;
  glyph: { pie: number[]; arcs: Record<string, number> };
}

export interface GraphEdge {
  source: string;
  target: string;
  migrated: number;
  p: number;
  pi: number;
}

export interface GroupArc {
  group: number;
  size: number;
  start: number;
  end: number;
}

export interface GraphPayload {
  window: { start: string; end: string };
  nodes: GraphNode[];
  edges: GraphEdge[];
  ring: string[];
  group_arcs: GroupArc[];
}

export interface Histogram {
  bin_edges: number[];
  counts: number[];
  group_counts: number[][];
}

export interface PcpRow {
  project: string;
  group: number;
  recency: number;
  pa: number;
  propensity: number;
  impact: number;
}

export interface AnalysisResponse {
  request: Required<Omit<AnalysisRequest, "window">> & {
    window: { start: string; end: string };
  };
  projects: string[];
  alive: string[];
  scores: MechanismScore[];
  clusters: ClusterSummary;
  graph: GraphPayload;
  histograms: Record<string, Histogram>;
  pcp: PcpRow[];
}

export interface CorrelationEntry {
  value: number;
  degenerate: boolean;
}

export interface EvolutionSeries {
  project: string;
  days: string[];
  buyers: number[];
  sellers: number[];
  holders: number[];
  mechanisms: Record<string, { raw: number[]; normalized: number[] }>;
}

export interface PairResponse {
  window: { start: string; end: string };
  pair: [string, string];
  co_occurrence: { buyers: number; sellers: number; holders: number };
  correlations: Record<string, CorrelationEntry>;
  evolution: Record<string, EvolutionSeries>;
}

export type LayoutMode = "wheel" | "fisheye" | "squaresparse";

export const MECHANISM_KEYS = ["recency", "pa", "propensity", "impact"] as const;
export type MechanismKey = (typeof MECHANISM_KEYS)[number];

export const MECHANISM_COLORS: Record<MechanismKey, string> = {
  recency: "#e8863a",
  pa: "#3f9d5a",
  propensity: "#3a6fb8",
  impact: "#c83a3a",
};
