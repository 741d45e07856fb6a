import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { AnalysisRequest, AnalysisResponse, EvolutionSeries, PairResponse, ProjectsResponse } from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));

function load<T>(name: string): T {
  return JSON.parse(readFileSync(join(here, "fixtures", name), "utf-8")) as T;
}

export const analysisFixture = (): AnalysisResponse => load("analysis.json");
export const projectsFixture = (): ProjectsResponse => load("projects.json");
export const pairFixture = (): PairResponse => load("pair.json");
export const evolutionFixture = (): EvolutionSeries => load("evolution.json");

/** Analysis stub that counts calls and can be made slow for latest-wins tests. */
export class FakeApi {
  calls: AnalysisRequest[] = [];
  private response: AnalysisResponse;
  delays: number[] = [];

  constructor(response: AnalysisResponse = analysisFixture()) {
    this.response = response;
  }

  async analysis(request: AnalysisRequest): Promise<AnalysisResponse> {
    this.calls.push(request);
    const delay = this.delays.shift() ?? 0;
    if (delay) await new Promise((resolve) => setTimeout(resolve, delay));
    return structuredClone(this.response);
  }
}
