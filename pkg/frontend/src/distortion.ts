/** Client-side sparse configurations over server-provided coordinates.
 *
 * Both transforms keep every node on screen and preserve the relative order
 * of coordinates along each axis (monotone maps), which is what keeps the
 * triangle layout readable after distortion.
 */

export interface Point {
  x: number;
  y: number;
}

/** Graphical fisheye: radial magnification around a focus point.
 *
 * r' = r * (d + 1) / (d * r / R + 1) with distortion d, applied to the
 * distance from the focus, normalized by the viewport radius R. Monotone in
 * r, fixes r = 0 and r = R.
 */
export function fisheye(point: Point, focus: Point, radius: number, distortion = 3): Point {
  const dx = point.x - focus.x;
  const dy = point.y - focus.y;
  const r = Math.hypot(dx, dy);
  if (r === 0 || radius <= 0 || r >= radius) return { ...point }; // beyond the lens nothing moves
  const rNew = (r * (distortion + 1)) / ((distortion * r) / radius + 1);
  return { x: focus.x + (dx / r) * rNew, y: focus.y + (dy / r) * rNew };
}

/** Square-sparse: spread points onto an even grid by coordinate rank.
 *
 * Each axis is remapped independently to rank / (n - 1) of its sorted order
 * (average ranks on ties), scaled into the viewport; relative order along
 * both axes is preserved exactly.
 */
export function squareSparse(points: Point[], width: number, height: number): Point[] {
  const rank = (values: number[]): number[] => {
    const order = values
      .map((v, i) => ({ v, i }))
      .sort((a, b) => a.v - b.v || a.i - b.i);
    const ranks = new Array<number>(values.length);
    let at = 0;
    while (at < order.length) {
      let end = at;
      while (end + 1 < order.length && order[end + 1].v === order[at].v) end++;
      const avg = (at + end) / 2;
      for (let k = at; k <= end; k++) ranks[order[k].i] = avg;
      at = end + 1;
    }
    return ranks;
  };
  const n = points.length;
  if (n === 0) return [];
  if (n === 1) return [{ x: width / 2, y: height / 2 }];
  const rx = rank(points.map((p) => p.x));
  const ry = rank(points.map((p) => p.y));
  return points.map((_, i) => ({
    x: (rx[i] / (n - 1)) * width,
    y: (ry[i] / (n - 1)) * height,
  }));
}
