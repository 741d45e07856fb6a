/** Thin fetch client; in-flight analysis requests are superseded latest-wins. */

import type { AnalysisRequest, AnalysisResponse, PairResponse, ProjectsResponse, EvolutionSeries } from "./types.js";

export interface ApiError {
  error: string;
  message: string;
}

export class ApiClient {
  private analysisAbort: AbortController | null = null;

  constructor(private baseUrl: string = "") {}

  private async getJson<T>(path: string): Promise<T> {
    const res = await fetch(this.baseUrl + path);
    const body = await res.json();
    if (!res.ok) throw body as ApiError;
    return body as T;
  }

  projects(): Promise<ProjectsResponse> {
    return this.getJson("/api/projects");
  }

  /** POST an analysis request; any in-flight one is aborted (latest wins). */
  async analysis(request: AnalysisRequest): Promise<AnalysisResponse> {
    this.analysisAbort?.abort();
    const controller = new AbortController();
    this.analysisAbort = controller;
    const res = await fetch(this.baseUrl + "/api/analysis", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(request),
      signal: controller.signal,
    });
    const body = await res.json();
    if (!res.ok) throw body as ApiError;
    return body as AnalysisResponse;
  }

  pair(a: string, b: string, window: string): Promise<PairResponse> {
    const q = new URLSearchParams({ a, b, window });
    return this.getJson(`/api/pair?${q}`);
  }

  evolution(project: string, window: string): Promise<EvolutionSeries> {
    const q = new URLSearchParams({ project, window });
    return this.getJson(`/api/evolution?${q}`);
  }
}
