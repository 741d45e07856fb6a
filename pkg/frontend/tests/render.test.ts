import { describe, expect, it } from "vitest";

import {
  renderCoGlyph,
  renderEvolution,
  renderGlyph,
  renderHistogram,
  renderPcp,
  renderProjectTable,
  renderWheel,
} from "../src/render.js";
import {
  buildCoGlyph,
  buildEvolution,
  buildHistograms,
  buildPcp,
  buildProjectList,
  buildWheel,
} from "../src/viewmodels.js";
import type { ViewState } from "../src/state.js";
import { analysisFixture, evolutionFixture, pairFixture } from "./helpers.js";

const state: ViewState = {
  request: { window: "x" },
  selectedGroup: null,
  selectedProject: null,
  selectedPair: null,
  layoutMode: "wheel",
};

function attrValues(svg: string, attr: string): number[] {
  const re = new RegExp(`${attr}="([^"]+)"`, "g");
  const out: number[] = [];
  for (const match of svg.matchAll(re)) out.push(Number(match[1]));
  return out;
}

describe("renderHistogram", () => {
  it("one background bar per bin with the payload counts attached", () => {
    const response = analysisFixture();
    const vm = buildHistograms(response, null)[0];
    const svg = renderHistogram(vm);
    expect(attrValues(svg, "data-count")).toEqual(vm.counts);
    expect((svg.match(/class="hist-bg"/g) ?? []).length).toBe(vm.counts.length);
    expect((svg.match(/class="hist-fg"/g) ?? []).length).toBe(vm.counts.length);
  });
});

describe("renderPcp", () => {
  it("emphasized line is rendered with the emphasis class, others dimmed", () => {
    const response = analysisFixture();
    const target = response.projects[1];
    const svg = renderPcp(buildPcp(response, null, target));
    expect(svg.match(/class="pcp-line emphasized"/g)?.length).toBe(1);
    expect(svg.match(/dimmed/g)?.length).toBe(response.projects.length - 1);
  });
});

describe("renderWheel", () => {
  it("carries migrated counts and mechanism payloads on edges and nodes", () => {
    const response = analysisFixture();
    const vm = buildWheel(response, state, 520, 520);
    const svg = renderWheel(vm);
    expect(svg.match(/class="wheel-node/g)?.length).toBe(vm.nodes.length);
    expect((svg.match(/class="flow-edge"/g) ?? []).length).toBe(vm.edges.length);
    const migratedSorted = attrValues(svg, "data-migrated").sort((a, b) => a - b);
    const expected = vm.edges.map((e) => e.migrated).sort((a, b) => a - b);
    expect(migratedSorted).toEqual(expected);
  });
});

describe("renderGlyph", () => {
  it("donut arc angle attributes are proportional to the payload scores", () => {
    const response = analysisFixture();
    const node = response.graph.nodes.find((n) => n.alive)!;
    const svg = renderGlyph(node.project, node.glyph.pie, node.glyph.arcs);
    const angles = attrValues(svg, "data-angle");
    const values = attrValues(svg, "data-value");
    expect(angles.length).toBe(4);
    for (let i = 0; i < 4; i++) {
      expect(angles[i]).toBeCloseTo(values[i] * (Math.PI / 2), 10);
    }
    const fractions = attrValues(svg, "data-fraction");
    const sum = fractions.reduce((a, b) => a + b, 0);
    expect(sum).toBeCloseTo(1.0, 6);
  });
});

describe("renderCoGlyph", () => {
  it("encodes counts, correlation angles, and clickability", () => {
    const pair = pairFixture();
    const svg = renderCoGlyph(buildCoGlyph(pair, 100));
    expect(svg).toContain('class="co-glyph clickable"');
    const values = attrValues(svg, "data-value");
    expect(values).toEqual([
      pair.co_occurrence.buyers,
      pair.co_occurrence.sellers,
      pair.co_occurrence.holders,
    ]);
    const corr = attrValues(svg, "data-corr");
    const angles = attrValues(svg, "data-angle");
    corr.forEach((value, i) => {
      expect(angles[i]).toBeCloseTo(Math.abs(value) * Math.PI, 10);
    });
  });
});

describe("renderEvolution", () => {
  it("emits one stacked bar pair and one impact point per day", () => {
    const vm = buildEvolution(evolutionFixture());
    const svg = renderEvolution(vm);
    expect((svg.match(/class="evo-buyers"/g) ?? []).length).toBe(vm.days.length);
    expect((svg.match(/class="evo-impact"/g) ?? []).length).toBe(vm.days.length);
  });
});

describe("renderProjectTable", () => {
  it("header counts equal rendered row counts per group", () => {
    const sections = buildProjectList(analysisFixture());
    const html = renderProjectTable(sections);
    for (const section of sections) {
      const headerCount = new RegExp(
        `data-group="${section.group}" data-count="(\\d+)"`,
      ).exec(html);
      expect(headerCount).not.toBeNull();
      expect(Number(headerCount![1])).toBe(section.count);
      const rows = html.match(
        new RegExp(`class="project-row" data-project="[^"]+" data-group="${section.group}"`, "g"),
      );
      expect(rows?.length).toBe(section.count);
    }
  });
});
