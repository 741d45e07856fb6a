/** Tiny SVG string builder: renderers stay pure and assertable in tests. */

export type Attrs = Record<string, string | number | boolean | null | undefined>;

const escapeText = (value: string): string =>
  value.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

const escapeAttr = (value: string): string =>
  escapeText(value).replace(/"/g, "&quot;");

export function el(tag: string, attrs: Attrs = {}, children: string[] | string = []): string {
  const parts: string[] = [];
  for (const [key, value] of Object.entries(attrs)) {
    if (value === null || value === undefined || value === false) continue;
    parts.push(`${key}="${escapeAttr(String(value))}"`);
  }
  const open = parts.length ? `<${tag} ${parts.join(" ")}` : `<${tag}`;
  const body = Array.isArray(children) ? children.join("") : escapeText(children);
  return body ? `${open}>${body}</${tag}>` : `${open}/>`;
}

export function svgRoot(width: number, height: number, children: string[], attrs: Attrs = {}): string {
  return el(
    "svg",
    { xmlns: "http://www.w3.org/2000/svg", viewBox: `0 0 ${width} ${height}`, width, height, ...attrs },
    children,
  );
}

/** Annular sector path between radii r0 <= r1 spanning [a0, a1] radians
 * (clockwise from 12 o'clock). */
export function arcPath(
  cx: number,
  cy: number,
  r0: number,
  r1: number,
  a0: number,
  a1: number,
): string {
  const pt = (r: number, a: number): [number, number] => [
    cx + r * Math.sin(a),
    cy - r * Math.cos(a),
  ];
  const large = a1 - a0 > Math.PI ? 1 : 0;
  const [x0, y0] = pt(r1, a0);
  const [x1, y1] = pt(r1, a1);
  const [x2, y2] = pt(r0, a1);
  const [x3, y3] = pt(r0, a0);
  return [
    `M ${x0} ${y0}`,
    `A ${r1} ${r1} 0 ${large} 1 ${x1} ${y1}`,
    `L ${x2} ${y2}`,
    `A ${r0} ${r0} 0 ${large} 0 ${x3} ${y3}`,
    "Z",
  ].join(" ");
}
