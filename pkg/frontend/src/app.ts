/** Browser bootstrap: wires the store, API client, and renderers into the
 * four coordinated views. All data flows one way: ViewState + response ->
 * view models -> SVG/HTML strings -> DOM; events only mutate the store.
 */

import { ApiClient } from "./api.js";
import { DashboardStore } from "./state.js";
import {
  renderCoGlyph,
  renderEvolution,
  renderGlyph,
  renderHistogram,
  renderPcp,
  renderProjectTable,
  renderWheel,
} from "./render.js";
import {
  buildCoGlyph,
  buildEvolution,
  buildHistograms,
  buildPcp,
  buildProjectList,
  buildWheel,
} from "./viewmodels.js";
import type { LayoutMode, PairResponse } from "./types.js";
import { ATTRIBUTES } from "./attributes.js";

declare global {
  interface Window {
    SUBSTRACE_API?: string;
  }
}

// same-origin by default; set window.SUBSTRACE_API when the API runs elsewhere
const api = new ApiClient(window.SUBSTRACE_API ?? "http://127.0.0.1:8787");
let highlighted: string | null = null;
const pairCache = new Map<string, PairResponse>();

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

async function start(): Promise<void> {
  const projects = await api.projects();
  const windowValue = `${projects.span.start}:${projects.span.end}`;
  (byId("window-start") as HTMLInputElement).value = projects.span.start;
  (byId("window-end") as HTMLInputElement).value = projects.span.end;

  const attrBox = byId("attribute-checkboxes");
  attrBox.innerHTML = ATTRIBUTES.map(
    (name) =>
      `<label><input type="checkbox" name="attr" value="${name}" checked> ${name}</label>`,
  ).join("");

  const store = new DashboardStore(api, { window: windowValue, k: 6, seed: 0 });
  store.subscribe(render);
  wireControls(store);
  await store.updateRequest({});

  function render(): void {
    const response = store.response;
    byId("error-banner").textContent = store.lastError
      ? `${store.lastError.error}: ${store.lastError.message}`
      : "";
    if (!response) return;

    byId("project-list").innerHTML = renderProjectTable(buildProjectList(response));
    byId("histograms").innerHTML = buildHistograms(response, store.state.selectedGroup)
      .map((vm) => renderHistogram(vm))
      .join("");
    byId("pcp").innerHTML = renderPcp(
      buildPcp(response, store.state.selectedGroup, highlighted),
    );
    byId("wheel").innerHTML = renderWheel(buildWheel(response, store.state, 520, 520));

    const glyphHost = byId("glyph");
    const pid = store.state.selectedProject ?? highlighted;
    const node = response.graph.nodes.find((n) => n.project === pid);
    glyphHost.innerHTML = node ? renderGlyph(node.project, node.glyph.pie, node.glyph.arcs) : "";

    renderImpactView(store).catch(() => undefined);
    wireDynamic(store);
  }

  async function renderImpactView(store: DashboardStore): Promise<void> {
    const response = store.response;
    const host = byId("set-matrix");
    if (!response || store.state.selectedGroup === null) {
      host.innerHTML = '<p class="hint">Select a group arc in the wheel to compare pairs.</p>';
      return;
    }
    const members = response.projects.filter(
      (p) => response.clusters.assignments[p] === store.state.selectedGroup,
    );
    const pairs: [string, string][] = [];
    for (let i = 0; i < members.length; i++)
      for (let j = i + 1; j < members.length; j++) pairs.push([members[i], members[j]]);
    const windowValue = `${response.request.window.start}:${response.request.window.end}`;
    const loaded: PairResponse[] = [];
    for (const [a, b] of pairs.slice(0, 21)) {
      const key = `${a}|${b}|${windowValue}`;
      let data = pairCache.get(key);
      if (!data) {
        try {
          data = await api.pair(a, b, windowValue);
          pairCache.set(key, data);
        } catch {
          continue; // glyph marked stale by omission
        }
      }
      loaded.push(data);
    }
    const maxCount = Math.max(
      1,
      ...loaded.flatMap((d) => [d.co_occurrence.buyers, d.co_occurrence.sellers, d.co_occurrence.holders]),
    );
    host.innerHTML = loaded.map((d) => renderCoGlyph(buildCoGlyph(d, maxCount))).join("");

    const evo = byId("evolution");
    if (store.state.selectedPair) {
      const [a, b] = store.state.selectedPair;
      const key = `${a}|${b}|${windowValue}`;
      const data = pairCache.get(key);
      evo.innerHTML = data
        ? renderEvolution(buildEvolution(data.evolution[a])) +
          renderEvolution(buildEvolution(data.evolution[b]))
        : "";
    } else {
      evo.innerHTML = "";
    }
  }

  function wireControls(store: DashboardStore): void {
    byId("apply").addEventListener("click", () => {
      const start = (byId("window-start") as HTMLInputElement).value;
      const end = (byId("window-end") as HTMLInputElement).value;
      const k = Number((byId("k-select") as HTMLSelectElement).value);
      const method = (byId("method-select") as HTMLSelectElement).value as "kmeans" | "gmm";
      const attrs = Array.from(
        document.querySelectorAll<HTMLInputElement>('input[name="attr"]:checked'),
      ).map((box) => box.value);
      void store.updateRequest({ window: `${start}:${end}`, k, method, attributes: attrs });
    });
    byId("layout-select").addEventListener("change", (ev) => {
      store.setLayoutMode((ev.target as HTMLSelectElement).value as LayoutMode);
    });
    byId("clear").addEventListener("click", () => store.clearSelections());
  }

  function wireDynamic(store: DashboardStore): void {
    document.querySelectorAll<SVGElement>(".group-arc, .group-header").forEach((arc) => {
      arc.addEventListener("click", () => {
        store.selectGroup(Number(arc.getAttribute("data-group")));
      });
    });
    document.querySelectorAll<SVGElement>(".wheel-node, .ring-slot").forEach((node) => {
      const pid = node.getAttribute("data-project");
      node.addEventListener("click", () => store.selectProject(pid));
      node.addEventListener("mouseenter", () => {
        highlighted = pid;
        render();
      });
    });
    document.querySelectorAll<HTMLElement>(".project-row").forEach((row) => {
      row.addEventListener("mouseenter", () => {
        highlighted = row.getAttribute("data-project");
        render();
      });
      row.addEventListener("mouseleave", () => {
        highlighted = null;
        render();
      });
    });
    document.querySelectorAll<SVGElement>(".co-glyph.clickable").forEach((glyph) => {
      glyph.addEventListener("click", () => {
        const pair = (glyph.getAttribute("data-pair") ?? "").split("|");
        if (pair.length === 2) store.selectPair([pair[0], pair[1]]);
      });
    });
  }
}

start().catch((err) => {
  document.body.insertAdjacentHTML(
    "afterbegin",
    `<p class="fatal">failed to start: ${String(err)}</p>`,
  );
});
