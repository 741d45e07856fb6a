/** SVG renderers for the four views. Pure string generation; the app shell
 * injects the strings and wires events through data-* attributes.
 */

import { arcPath, el, svgRoot } from "./svg.js";
import type {
  CoGlyphVM,
  EvolutionVM,
  GroupSection,
  HistogramVM,
  Polyline,
  WheelVM,
} from "./viewmodels.js";
import { buildGlyphArcs } from "./viewmodels.js";
import { MECHANISM_COLORS } from "./types.js";

// --- mechanisms view ----------------------------------------------------------

export function renderHistogram(vm: HistogramVM, width = 220, height = 120): string {
  const maxCount = Math.max(1, ...vm.counts);
  const n = vm.counts.length;
  const barW = width / n;
  const bars: string[] = [];
  for (let i = 0; i < n; i++) {
    const full = (vm.counts[i] / maxCount) * (height - 18);
    const hi = (vm.highlighted[i] / maxCount) * (height - 18);
    bars.push(
      el("rect", {
        class: "hist-bg",
        "data-metric": vm.metric,
        "data-bin": i,
        "data-count": vm.counts[i],
        x: i * barW + 1,
        y: height - full,
        width: barW - 2,
        height: full,
        fill: "#ddd",
      }),
      el("rect", {
        class: "hist-fg",
        "data-metric": vm.metric,
        "data-bin": i,
        "data-highlighted": vm.highlighted[i],
        x: i * barW + 1,
        y: height - hi,
        width: barW - 2,
        height: hi,
        fill: MECHANISM_COLORS[vm.metric],
      }),
    );
  }
  bars.push(el("text", { x: 4, y: 12, "font-size": 11 }, vm.metric));
  return svgRoot(width, height, bars, { class: `histogram histogram-${vm.metric}` });
}

export function renderPcp(lines: Polyline[], width = 420, height = 200): string {
  const axes = ["recency", "pa", "propensity", "impact"] as const;
  const pad = 24;
  const xOf = (i: number): number => pad + (i * (width - 2 * pad)) / (axes.length - 1);
  const yOf = (v: number): number => height - 16 - v * (height - 32);
  const parts: string[] = axes.map((name, i) =>
    el("line", { x1: xOf(i), y1: 12, x2: xOf(i), y2: height - 16, stroke: "#999" }),
  );
  axes.forEach((name, i) =>
    parts.push(el("text", { x: xOf(i) - 12, y: height - 2, "font-size": 10 }, name)),
  );
  for (const line of lines) {
    const points = axes.map((a, i) => `${xOf(i)},${yOf(line.values[a])}`).join(" ");
    parts.push(
      el("polyline", {
        class: `pcp-line${line.emphasized ? " emphasized" : ""}${line.dimmed ? " dimmed" : ""}`,
        "data-project": line.project,
        "data-group": line.group,
        points,
        fill: "none",
        stroke: line.color,
        "stroke-width": line.emphasized ? 3 : 1.2,
        opacity: line.dimmed ? 0.15 : 0.85,
      }),
    );
  }
  return svgRoot(width, height, parts, { class: "pcp" });
}

// --- substitution wheel ----------------------------------------------------------

export function renderWheel(vm: WheelVM, size = 520): string {
  const cx = size / 2;
  const cy = size / 2;
  const ringR0 = size * 0.42;
  const ringR1 = size * 0.45;
  const groupR0 = size * 0.46;
  const groupR1 = size * 0.49;
  const tau = 2 * Math.PI;
  const parts: string[] = [];

  for (const arc of vm.groupArcs) {
    parts.push(
      el("path", {
        class: "group-arc",
        "data-group": arc.group,
        "data-size": arc.size,
        d: arcPath(cx, cy, groupR0, groupR1, arc.start * tau, Math.max(arc.end * tau - 0.01, arc.start * tau)),
        fill: arc.color,
      }),
    );
  }
  for (const slot of vm.ring) {
    parts.push(
      el("path", {
        class: "ring-slot",
        "data-project": slot.project,
        "data-holders": slot.holders,
        d: arcPath(cx, cy, ringR0, ringR1, slot.start * tau, Math.max(slot.end * tau - 0.005, slot.start * tau)),
        fill: slot.color,
        stroke: "#888",
        "stroke-width": 0.3,
      }),
    );
  }

  // triangle inset: wheel coordinates already live in the viewport frame
  const inset = size * 0.18;
  const scale = (size - 2 * inset) / size;
  const fx = (x: number): number => inset + x * scale;
  const fy = (y: number): number => inset + y * scale;

  const byProject = new Map(vm.nodes.map((n) => [n.project, n] as const));
  for (const edge of vm.edges) {
    const s = byProject.get(edge.source);
    const t = byProject.get(edge.target);
    if (!s || !t) continue;
    parts.push(
      el("line", {
        class: "flow-edge",
        "data-source": edge.source,
        "data-target": edge.target,
        "data-migrated": edge.migrated,
        "data-p": edge.p,
        "data-pi": edge.pi,
        x1: fx(s.x),
        y1: fy(s.y),
        x2: fx(t.x),
        y2: fy(t.y),
        stroke: "#555",
        "stroke-width": edge.width,
        "marker-end": "url(#arrow)",
        opacity: 0.6,
      }),
    );
  }
  for (const node of vm.nodes) {
    parts.push(
      el(
        "circle",
        {
          class: `wheel-node${node.alive ? "" : " dead"}`,
          "data-project": node.project,
          "data-group": node.group ?? "",
          cx: fx(node.x),
          cy: fy(node.y),
          r: node.radius,
          fill: node.alive ? node.color : "#ffffff",
          stroke: "#444",
          "stroke-width": 0.8,
        },
        [el("title", {}, node.project)],
      ),
    );
  }
  const defs =
    '<defs><marker id="arrow" viewBox="0 0 8 8" refX="7" refY="4" markerWidth="6" markerHeight="6" orient="auto-start-reverse"><path d="M 0 0 L 8 4 L 0 8 z" fill="#555"/></marker></defs>';
  return svgRoot(size, size, [defs, ...parts], { class: "wheel" });
}

/** Three-layer status glyph: initial avatar, role pie, mechanism donut. */
export function renderGlyph(
  project: string,
  pie: number[],
  arcs: Record<string, number>,
  size = 96,
): string {
  const cx = size / 2;
  const cy = size / 2;
  const tau = 2 * Math.PI;
  const parts: string[] = [];
  // top layer: project-initial avatar
  parts.push(el("circle", { cx, cy, r: size * 0.16, fill: "#333" }));
  parts.push(
    el(
      "text",
      { x: cx, y: cy + 4, "text-anchor": "middle", fill: "#fff", "font-size": 12 },
      project.slice(2, 4),
    ),
  );
  // middle layer: buyer/seller/holder pie
  const pieColors = ["#6a51a3", "#bcbddc", "#969696"];
  let angle = 0;
  pie.forEach((fraction, i) => {
    const sweep = fraction * tau;
    parts.push(
      el("path", {
        class: "glyph-pie",
        "data-role": ["buyers", "sellers", "holders"][i],
        "data-fraction": fraction,
        d: arcPath(cx, cy, size * 0.18, size * 0.3, angle, angle + Math.max(sweep - 1e-4, 0)),
        fill: pieColors[i],
      }),
    );
    angle += sweep;
  });
  // bottom layer: quadrant donut, sweep proportional to each normalized score
  for (const arc of buildGlyphArcs(arcs)) {
    parts.push(
      el("path", {
        class: "glyph-arc",
        "data-metric": arc.metric,
        "data-angle": arc.angle,
        "data-value": arcs[arc.metric] ?? 0,
        d: arcPath(cx, cy, size * 0.34, size * 0.46, arc.start, arc.start + Math.max(arc.angle, 1e-6)),
        fill: arc.color,
      }),
    );
  }
  return svgRoot(size, size, parts, { class: "status-glyph", "data-project": project });
}

// --- impact dynamic view ------------------------------------------------------------

export function renderCoGlyph(vm: CoGlyphVM, size = 84): string {
  const cx = size / 2;
  const cy = size / 2;
  const rMax = size * 0.42;
  const parts: string[] = [];
  // right half: rose sectors for co-occurring buyers/sellers/holders
  const third = Math.PI / 3;
  vm.sectors.forEach((sector, i) => {
    parts.push(
      el("path", {
        class: "rose-sector",
        "data-role": sector.role,
        "data-value": sector.value,
        "data-radius": sector.radius,
        d: arcPath(cx, cy, 0, Math.max(sector.radius * rMax, 1e-4), i * third, (i + 1) * third),
        fill: ["#6a51a3", "#bcbddc", "#969696"][i],
      }),
    );
  });
  // left half: concentric correlation rings, angle ~ |r|
  vm.rings.forEach((ring, i) => {
    const r0 = rMax * (0.3 + 0.22 * i);
    parts.push(
      el("path", {
        class: "corr-ring",
        "data-role": ring.role,
        "data-corr": ring.value,
        "data-angle": ring.angle,
        d: arcPath(cx, cy, r0, r0 + rMax * 0.16, Math.PI, Math.PI + Math.max(ring.angle, 1e-6)),
        fill: ring.color,
      }),
    );
  });
  return svgRoot(size, size, parts, {
    class: `co-glyph${vm.clickable ? " clickable" : " disabled"}`,
    "data-pair": vm.pair.join("|"),
    "data-total": vm.totalCo,
  });
}

export function renderEvolution(vm: EvolutionVM, width = 460, height = 240): string {
  const n = vm.days.length;
  const parts: string[] = [];
  const lanes = { bars: [8, 88], area: [96, 150], lines: [158, 232] };
  const x = (i: number): number => (n === 1 ? width / 2 : 8 + (i * (width - 16)) / (n - 1));
  const barW = Math.max((width - 16) / Math.max(n, 1) - 1, 1);

  const maxBS = Math.max(1, ...vm.stackedBars.map((b) => b.buyers + b.sellers));
  vm.stackedBars.forEach((bar, i) => {
    const hB = ((lanes.bars[1] - lanes.bars[0]) * bar.buyers) / maxBS;
    const hS = ((lanes.bars[1] - lanes.bars[0]) * bar.sellers) / maxBS;
    parts.push(
      el("rect", {
        class: "evo-buyers", "data-day": bar.day, "data-value": bar.buyers,
        x: x(i) - barW / 2, y: lanes.bars[1] - hB, width: barW, height: Math.max(hB, 0),
        fill: "#6a51a3",
      }),
      el("rect", {
        class: "evo-sellers", "data-day": bar.day, "data-value": bar.sellers,
        x: x(i) - barW / 2, y: lanes.bars[1] - hB - hS, width: barW, height: Math.max(hS, 0),
        fill: "#bcbddc",
      }),
    );
  });

  const maxHolders = Math.max(1, ...vm.holderArea);
  const areaPoints = vm.holderArea
    .map((v, i) => `${x(i)},${lanes.area[1] - ((lanes.area[1] - lanes.area[0]) * v) / maxHolders}`)
    .join(" ");
  parts.push(
    el("polygon", {
      class: "evo-holders",
      points: `${x(0)},${lanes.area[1]} ${areaPoints} ${x(n - 1)},${lanes.area[1]}`,
      fill: "#96969680",
    }),
  );

  for (const line of vm.mechanismLines) {
    const pts = line.values
      .map((v, i) => `${x(i)},${lanes.lines[1] - (lanes.lines[1] - lanes.lines[0]) * v}`)
      .join(" ");
    parts.push(
      el("polyline", {
        class: `evo-line evo-${line.metric}`,
        points: pts,
        fill: "none",
        stroke: line.color,
        "stroke-width": 1.4,
      }),
    );
  }
  vm.impactScatter.forEach((point, i) => {
    parts.push(
      el("circle", {
        class: "evo-impact",
        "data-day": point.day,
        "data-value": point.value,
        cx: x(i),
        cy: lanes.lines[1] - (lanes.lines[1] - lanes.lines[0]) * point.value,
        r: 1.8,
        fill: MECHANISM_COLORS.impact,
      }),
    );
  });
  parts.push(el("text", { x: 8, y: height - 2, "font-size": 10 }, vm.project));
  return svgRoot(width, height, parts, { class: "evolution", "data-project": vm.project });
}

// --- propensity view table (plain HTML) ------------------------------------------

export function renderProjectTable(sections: GroupSection[]): string {
  const blocks = sections.map((section) => {
    const rows = section.rows
      .map(
        (row) =>
          `<tr class="project-row" data-project="${row.project}" data-group="${row.group}">` +
          `<td>${row.project.slice(0, 10)}…</td>` +
          `<td>${row.propensity.toFixed(3)}</td><td>${row.recency.toFixed(3)}</td>` +
          `<td>${row.pa.toFixed(3)}</td><td>${row.impact.toFixed(3)}</td></tr>`,
      )
      .join("");
    return (
      `<tbody class="group-section" data-group="${section.group}">` +
      `<tr class="group-header" data-group="${section.group}" data-count="${section.count}">` +
      `<th colspan="5"><span class="swatch" style="background:${section.color}"></span>` +
      `Group ${section.group} — ${section.count} projects</th></tr>${rows}</tbody>`
    );
  });
  return (
    '<table class="project-list"><thead><tr>' +
    "<th>project</th><th>propensity</th><th>recency</th><th>attachment</th><th>impact</th>" +
    `</tr></thead>${blocks.join("")}</table>`
  );
}
