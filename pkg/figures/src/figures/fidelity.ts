/** Fidelity F(t) between two preparations' system density matrices. */

import { FidelitySeries } from "../csv.js";
import { seriesColor } from "../colormap.js";
import { el, linearScale, polyline, svgDocument, text, xAxis, yAxis, FigureMeta } from "../svg.js";

export interface FidelityOptions {
  series: Array<{ label: string; data: FidelitySeries }>;
  configHash: string;
  tau2?: number;
}

export function renderFidelity(opts: FidelityOptions): string {
  if (!opts.series.length) {
    throw new Error("no fidelity series given");
  }
  const panelW = 380;
  const panelH = 260;
  const marginL = 56;
  const marginTop = 30;
  const width = marginL + panelW + 150;
  const height = marginTop + panelH + 56;

  const tMax = Math.max(...opts.series.map((s) => s.data.times[s.data.times.length - 1]));
  const xs = linearScale([0, tMax], [marginL, marginL + panelW]);
  const ys = linearScale([0, 1.05], [marginTop + panelH, marginTop]);
  const parts: string[] = [];
  parts.push(xAxis(xs, marginTop + panelH, "t J"));
  parts.push(yAxis(ys, marginL, "fidelity F"));

  opts.series.forEach((s, i) => {
    const color = seriesColor(i);
    parts.push(polyline(s.data.times.map((t, k) => [xs(t), ys(s.data.fidelity[k])]), color));
    const ly = marginTop + 14 + 16 * i;
    parts.push(el("rect", { x: marginL + panelW + 14, y: ly - 9, width: 10, height: 3,
                            fill: color }));
    parts.push(text(marginL + panelW + 30, ly, s.label));
  });
  if (opts.tau2 !== undefined && opts.tau2 <= tMax) {
    parts.push(el("line", {
      x1: xs(opts.tau2), x2: xs(opts.tau2), y1: marginTop, y2: marginTop + panelH,
      stroke: "#888", "stroke-dasharray": "3,3",
    }));
    parts.push(text(xs(opts.tau2) + 3, marginTop + 12, "tau2", { fill: "#666" }));
  }

  const meta: FigureMeta = {
    kind: "fidelity",
    config_sha256: opts.configHash,
    series: opts.series.map((s) => s.label),
  };
  return svgDocument(width, height, meta, parts.join(""));
}
