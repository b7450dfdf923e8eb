/** Regime diagram: quasi-steady-state current against Jz, one series per size. */

import { RegimeDiagram } from "./scaling.js";
import { seriesColor } from "../colormap.js";
import { el, fmt, linearScale, polyline, svgDocument, text, xAxis, yAxis, FigureMeta } from "../svg.js";

export function renderRegime(agg: RegimeDiagram): string {
  if (!agg.points.length) {
    throw new Error("regime diagram has no points");
  }
  const sizes = [...new Set(agg.points.map((p) => p.N))].sort((a, b) => a - b);
  const jzs = agg.points.map((p) => p.Jz);
  const currents = agg.points.map((p) => p.q_tau2);
  const panelW = 380;
  const panelH = 280;
  const marginL = 64;
  const marginTop = 30;
  const width = marginL + panelW + 120;
  const height = marginTop + panelH + 56;

  const lo = Math.min(0, ...currents);
  const hi = Math.max(...currents);
  const xs = linearScale([Math.min(...jzs) - 0.05, Math.max(...jzs) + 0.05],
                         [marginL, marginL + panelW]);
  const ys = linearScale([lo, hi * 1.1 || 1], [marginTop + panelH, marginTop]);
  const parts: string[] = [];
  parts.push(xAxis(xs, marginTop + panelH, "Jz / J"));
  parts.push(yAxis(ys, marginL, "Q(tau2)"));

  sizes.forEach((n, si) => {
    const color = seriesColor(si);
    const series = agg.points
      .filter((p) => p.N === n)
      .sort((a, b) => a.Jz - b.Jz);
    if (series.length > 1) {
      parts.push(polyline(series.map((p) => [xs(p.Jz), ys(p.q_tau2)]), color));
    }
    for (const p of series) {
      parts.push(el("circle", { cx: xs(p.Jz), cy: ys(p.q_tau2), r: 3.5, fill: color }));
    }
    const ly = marginTop + 14 + 16 * si;
    parts.push(el("circle", { cx: marginL + panelW + 16, cy: ly - 4, r: 3.5, fill: color }));
    parts.push(text(marginL + panelW + 26, ly, `N = ${fmt(n)}`));
  });

  const meta: FigureMeta = {
    kind: "regime",
    config_sha256: agg.config_sha256,
    sizes,
    n_points: agg.points.length,
  };
  return svgDocument(width, height, meta, parts.join(""));
}
