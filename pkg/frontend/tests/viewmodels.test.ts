import { describe, expect, it } from "vitest";

import { fisheye, squareSparse } from "../src/distortion.js";
import {
  buildCoGlyph,
  buildEvolution,
  buildGlyphArcs,
  buildHistograms,
  buildPcp,
  buildProjectList,
  buildWheel,
  groupSizesFromAssignments,
  recountHistogram,
} from "../src/viewmodels.js";
import { MECHANISM_KEYS } from "../src/types.js";
import type { ViewState } from "../src/state.js";
import { analysisFixture, evolutionFixture, pairFixture } from "./helpers.js";

const baseState: ViewState = {
  request: { window: "x" },
  selectedGroup: null,
  selectedProject: null,
  selectedPair: null,
  layoutMode: "wheel",
};

describe("project list", () => {
  it("group header counts equal row counts and follow server order", () => {
    const response = analysisFixture();
    const sections = buildProjectList(response);
    expect(sections.map((s) => s.group)).toEqual(
      response.clusters.group_order.filter((g) =>
        sections.some((s) => s.group === g),
      ),
    );
    for (const section of sections) {
      expect(section.count).toBe(section.rows.length);
      expect(section.count).toBe(
        response.projects.filter((p) => response.clusters.assignments[p] === section.group).length,
      );
    }
    const total = sections.reduce((acc, s) => acc + s.count, 0);
    expect(total).toBe(response.projects.length);
  });
});

describe("histograms", () => {
  it("client recount equals the server payload, overall and per group", () => {
    const response = analysisFixture();
    for (const metric of MECHANISM_KEYS) {
      expect(recountHistogram(response, metric)).toEqual(
        response.histograms[metric].counts,
      );
      for (let g = 0; g < response.clusters.k; g++) {
        expect(recountHistogram(response, metric, g)).toEqual(
          response.histograms[metric].group_counts[g],
        );
      }
    }
  });

  it("bin sums equal the alive scored project count", () => {
    const response = analysisFixture();
    for (const vm of buildHistograms(response, null)) {
      expect(vm.counts.reduce((a, b) => a + b, 0)).toBe(response.projects.length);
    }
  });

  it("group selection highlights that group's distribution", () => {
    const response = analysisFixture();
    const group = response.clusters.group_order[0];
    for (const vm of buildHistograms(response, group)) {
      expect(vm.highlighted).toEqual(response.histograms[vm.metric].group_counts[group]);
    }
  });
});

describe("pcp", () => {
  it("one polyline per project, colored by group", () => {
    const response = analysisFixture();
    const lines = buildPcp(response, null, null);
    expect(lines.length).toBe(response.projects.length);
    const byGroup = new Set(lines.map((l) => `${l.group}:${l.color}`));
    expect(byGroup.size).toBeLessThanOrEqual(response.clusters.k);
  });

  it("highlight emphasizes one line and dims the rest", () => {
    const response = analysisFixture();
    const target = response.projects[2];
    const lines = buildPcp(response, null, target);
    const emphasized = lines.filter((l) => l.emphasized);
    expect(emphasized.map((l) => l.project)).toEqual([target]);
    expect(lines.filter((l) => l.dimmed).length).toBe(lines.length - 1);
  });
});

describe("wheel", () => {
  it("renders every node within the viewport", () => {
    const response = analysisFixture();
    const vm = buildWheel(response, baseState, 500, 500);
    expect(vm.nodes.length).toBe(response.graph.nodes.length);
    for (const node of vm.nodes) {
      expect(node.x).toBeGreaterThanOrEqual(0);
      expect(node.x).toBeLessThanOrEqual(500);
      expect(node.y).toBeGreaterThanOrEqual(0);
      expect(node.y).toBeLessThanOrEqual(500);
    }
  });

  it("group filter keeps only members and their in-between edges", () => {
    const response = analysisFixture();
    const group = response.clusters.group_order[0];
    const vm = buildWheel(response, { ...baseState, selectedGroup: group }, 500, 500);
    for (const node of vm.nodes) expect(node.group).toBe(group);
    const members = new Set(vm.nodes.map((n) => n.project));
    for (const edge of vm.edges) {
      expect(members.has(edge.source)).toBe(true);
      expect(members.has(edge.target)).toBe(true);
    }
  });

  it("ego selection keeps the node plus edge-sharing neighbors only", () => {
    const response = analysisFixture();
    const pid = response.projects[0];
    const vm = buildWheel(response, { ...baseState, selectedProject: pid }, 500, 500);
    const expected = new Set<string>([pid]);
    for (const e of response.graph.edges) {
      if (e.source === pid) expected.add(e.target);
      if (e.target === pid) expected.add(e.source);
    }
    expect(new Set(vm.nodes.map((n) => n.project))).toEqual(expected);
    for (const edge of vm.edges) {
      expect(edge.source === pid || edge.target === pid).toBe(true);
    }
  });

  it("ring follows holder-count descending order", () => {
    const response = analysisFixture();
    const vm = buildWheel(response, baseState, 500, 500);
    const holders = vm.ring.map((slot) => slot.holders);
    for (let i = 1; i < holders.length; i++) {
      expect(holders[i]).toBeLessThanOrEqual(holders[i - 1]);
    }
  });

  it("fisheye magnifies near the focus but preserves radial order and bounds", () => {
    const focus = { x: 250, y: 250 };
    const radius = 250;
    const rs = [10, 40, 90, 160, 240];
    const out = rs.map((r) => fisheye({ x: 250 + r, y: 250 }, focus, radius).x - 250);
    for (let i = 1; i < out.length; i++) expect(out[i]).toBeGreaterThan(out[i - 1]);
    for (let i = 0; i < out.length; i++) {
      expect(out[i]).toBeGreaterThanOrEqual(rs[i]); // magnified inside the lens
      expect(out[i]).toBeLessThanOrEqual(radius);
    }
  });

  it("square-sparse preserves the per-axis order of nodes", () => {
    const points = [
      { x: 5, y: 9 }, { x: 1, y: 2 }, { x: 7, y: 4 }, { x: 3, y: 8 },
    ];
    const spread = squareSparse(points, 100, 100);
    const orderBefore = points.map((_, i) => i).sort((a, b) => points[a].x - points[b].x);
    const orderAfter = points.map((_, i) => i).sort((a, b) => spread[a].x - spread[b].x);
    expect(orderAfter).toEqual(orderBefore);
  });
});

describe("status glyph arcs", () => {
  it("arc sweeps are proportional to the normalized scores", () => {
    const response = analysisFixture();
    const node = response.graph.nodes.find((n) => n.alive)!;
    const arcs = buildGlyphArcs(node.glyph.arcs);
    for (const arc of arcs) {
      expect(arc.angle).toBeCloseTo((node.glyph.arcs[arc.metric] ?? 0) * (Math.PI / 2), 12);
    }
    // quadrants tile the circle
    expect(arcs.map((a) => a.start)).toEqual([0, Math.PI / 2, Math.PI, (3 * Math.PI) / 2]);
  });
});

describe("co-occurrence glyph", () => {
  it("sector radii grow with counts and correlation arcs encode sign", () => {
    const pair = pairFixture();
    const vm = buildCoGlyph(pair, 50);
    for (const sector of vm.sectors) {
      expect(sector.radius).toBeCloseTo(Math.sqrt(pair.co_occurrence[sector.role] / 50), 12);
    }
    for (const ring of vm.rings) {
      const corr = pair.correlations[ring.role].value;
      expect(ring.angle).toBeCloseTo(Math.abs(corr) * Math.PI, 12);
      expect(ring.color).toBe(corr >= 0 ? "#c83a3a" : "#3a6fb8");
    }
  });

  it("zero co-occurrence disables the glyph", () => {
    const pair = pairFixture();
    pair.co_occurrence = { buyers: 0, sellers: 0, holders: 0 };
    const vm = buildCoGlyph(pair, 50);
    expect(vm.clickable).toBe(false);
  });
});

describe("evolution", () => {
  it("chart day count equals the window length", () => {
    const series = evolutionFixture();
    const vm = buildEvolution(series);
    expect(vm.days.length).toBe(series.days.length);
    expect(vm.stackedBars.length).toBe(series.days.length);
    expect(vm.impactScatter.length).toBe(series.days.length);
    for (const line of vm.mechanismLines) {
      expect(line.values.length).toBe(series.days.length);
    }
  });
});

describe("cross-view consistency", () => {
  it("group sizes recomputed from assignments equal the server payload", () => {
    const response = analysisFixture();
    expect(groupSizesFromAssignments(response)).toEqual(response.clusters.sizes);
  });
});
