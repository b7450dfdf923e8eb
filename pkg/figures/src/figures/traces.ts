/** Lead demagnetization z(t) and junction current Q(t) with window markers. */

import { Trajectory } from "../csv.js";
import { seriesColor } from "../colormap.js";
import { el, fmt, linearScale, polyline, svgDocument, text, xAxis, yAxis, FigureMeta } from "../svg.js";

export interface TracesOptions {
  traj: Trajectory;
  configHash: string;
  /** lead length; z(t) sums the first N_b columns, Q(t) is bond N_b - 1 */
  leadSites: number;
  tau1?: number;
  tau2?: number;
  /** divide times by N/J (the collapsed-axis convention) */
  normalizeBy?: number;
}

export function renderTraces(opts: TracesOptions): string {
  const { traj, leadSites } = opts;
  if (leadSites < 1 || leadSites >= traj.sites) {
    throw new Error(`lead length ${leadSites} incompatible with ${traj.sites} sites`);
  }
  const norm = opts.normalizeBy ?? 1.0;
  const times = traj.times.map((t) => t / norm);
  const z = traj.z.map((row) => {
    let s = 0;
    for (let i = 0; i < leadSites; i++) s += row[i];
    return s / leadSites;
  });
  const q = traj.q.map((row) => row[leadSites - 1]);

  const panelW = 320;
  const panelH = 220;
  const marginL = 56;
  const marginTop = 30;
  const gap = 72;
  const width = marginL + 2 * panelW + gap + 24;
  const height = marginTop + panelH + 56;
  const tLabel = norm === 1.0 ? "t J" : "t J / N";

  const parts: string[] = [];
  const tDom: [number, number] = [times[0], times[times.length - 1]];

  const drawPanel = (x0: number, values: number[], label: string, color: string) => {
    const lo = Math.min(...values);
    const hi = Math.max(...values);
    const pad = (hi - lo || 1) * 0.08;
    const xs = linearScale(tDom, [x0, x0 + panelW]);
    const ys = linearScale([lo - pad, hi + pad], [marginTop + panelH, marginTop]);
    parts.push(xAxis(xs, marginTop + panelH, tLabel));
    parts.push(yAxis(ys, x0, label));
    parts.push(polyline(times.map((t, i) => [xs(t), ys(values[i])]), color));
    for (const [tau, name] of [[opts.tau1, "tau1"], [opts.tau2, "tau2"]] as const) {
      if (tau === undefined) continue;
      const tv = tau / norm;
      if (tv < tDom[0] || tv > tDom[1]) continue;
      parts.push(el("line", {
        x1: xs(tv), x2: xs(tv), y1: marginTop, y2: marginTop + panelH,
        stroke: "#888", "stroke-dasharray": "3,3",
      }));
      parts.push(text(xs(tv) + 3, marginTop + 12, name, { fill: "#666" }));
    }
  };

  drawPanel(marginL, z, "lead magnetization z(t)", seriesColor(0));
  drawPanel(marginL + panelW + gap, q, "junction current Q(t)", seriesColor(1));

  const meta: FigureMeta = {
    kind: "traces",
    config_sha256: opts.configHash,
    lead_sites: leadSites,
    normalize_by: norm,
    tau1: opts.tau1 ?? null,
    tau2: opts.tau2 ?? null,
  };
  return svgDocument(width, height, meta, parts.join(""));
}
