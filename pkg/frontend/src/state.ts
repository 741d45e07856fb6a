/** Single source of truth for the four coordinated views.
 *
 * Every view derives from one ViewState plus one cached AnalysisResponse;
 * selections never copy response data. Each completed action notifies
 * subscribers exactly once, so a group selection refreshes all views in one
 * render cycle.
 */

import type { ApiClient } from "./api.js";
import type { AnalysisRequest, AnalysisResponse, LayoutMode } from "./types.js";

export interface ViewState {
  request: AnalysisRequest;
  selectedGroup: number | null;
  selectedProject: string | null;
  selectedPair: [string, string] | null;
  layoutMode: LayoutMode;
}

type Listener = (store: DashboardStore) => void;

export class DashboardStore {
  state: ViewState;
  response: AnalysisResponse | null = null;
  requestsIssued = 0;
  lastError: { error: string; message: string } | null = null;

  private listeners: Listener[] = [];
  private epoch = 0;

  constructor(private api: Pick<ApiClient, "analysis">, initial: AnalysisRequest) {
    this.state = {
      request: initial,
      selectedGroup: null,
      selectedProject: null,
      selectedPair: null,
      layoutMode: "wheel",
    };
  }

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  private notify(): void {
    for (const fn of this.listeners) fn(this);
  }

  /** Merge request edits and issue exactly one new analysis request. */
  async updateRequest(patch: Partial<AnalysisRequest>): Promise<void> {
    this.state.request = { ...this.state.request, ...patch };
    const epoch = ++this.epoch;
    this.requestsIssued += 1;
    try {
      const response = await this.api.analysis(this.state.request);
      if (epoch !== this.epoch) return; // superseded: latest wins
      this.response = response;
      this.lastError = null;
      // selections may no longer exist in the new response
      this.state.selectedGroup = this.validGroup(this.state.selectedGroup);
      this.state.selectedProject = this.validProject(this.state.selectedProject);
      this.state.selectedPair = null;
    } catch (err) {
      if (epoch !== this.epoch) return;
      // keep the prior response; surface the failure
      this.lastError = (err ?? { error: "Unknown", message: "request failed" }) as {
        error: string;
        message: string;
      };
    }
    this.notify();
  }

  private validGroup(group: number | null): number | null {
    if (group === null || !this.response) return null;
    return group < this.response.clusters.k ? group : null;
  }

  private validProject(pid: string | null): string | null {
    if (pid === null || !this.response) return null;
    return this.response.projects.includes(pid) ? pid : null;
  }

  selectGroup(group: number | null): void {
    this.state.selectedGroup = this.validGroup(group);
    if (
      this.state.selectedPair &&
      this.state.selectedGroup !== null &&
      !this.pairInGroup(this.state.selectedPair, this.state.selectedGroup)
    ) {
      this.state.selectedPair = null;
    }
    this.notify();
  }

  selectProject(pid: string | null): void {
    this.state.selectedProject = this.validProject(pid);
    this.notify();
  }

  /** Pair selection requires both members inside the selected group. */
  selectPair(pair: [string, string] | null): void {
    if (pair && this.state.selectedGroup !== null && !this.pairInGroup(pair, this.state.selectedGroup)) {
      return; // reject: would break the group/pair invariant
    }
    this.state.selectedPair = pair;
    this.notify();
  }

  setLayoutMode(mode: LayoutMode): void {
    this.state.layoutMode = mode;
    this.notify();
  }

  clearSelections(): void {
    this.state.selectedGroup = null;
    this.state.selectedProject = null;
    this.state.selectedPair = null;
    this.notify();
  }

  private pairInGroup(pair: [string, string], group: number): boolean {
    const assignments = this.response?.clusters.assignments ?? {};
    return assignments[pair[0]] === group && assignments[pair[1]] === group;
  }
}
