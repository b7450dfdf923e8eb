/** Finite-size scaling: data points plus both fitted model curves, log-log. */

import { seriesColor } from "../colormap.js";
import { el, fmt, logScale, polyline, svgDocument, text, xAxis, yAxis, FigureMeta } from "../svg.js";

export interface FitEntry {
  Jz: number;
  sizes: number[];
  currents: number[];
  power?: { amplitude: number; alpha: number; residual: number };
  exponential?: { amplitude: number; beta: number; residual: number };
  regime?: string;
  fit_error?: string;
}

export interface RegimeDiagram {
  config_sha256: string;
  points: Array<{ N: number; Jz: number; qbar: number; q_tau2: number }>;
  fits: FitEntry[];
}

export function renderScaling(agg: RegimeDiagram): string {
  const fits = agg.fits.filter((f) => f.sizes.length > 0 && f.currents.every((c) => c > 0));
  if (fits.length === 0) {
    throw new Error("regime diagram has no fittable (positive-current) entries");
  }
  const allN = fits.flatMap((f) => f.sizes);
  const allQ = fits.flatMap((f) => f.currents);
  const panelW = 380;
  const panelH = 300;
  const marginL = 64;
  const marginTop = 30;
  const width = marginL + panelW + 180;
  const height = marginTop + panelH + 56;

  const xs = logScale([Math.min(...allN) * 0.9, Math.max(...allN) * 1.1],
                      [marginL, marginL + panelW]);
  const ys = logScale([Math.min(...allQ) * 0.5, Math.max(...allQ) * 2.0],
                      [marginTop + panelH, marginTop]);
  const parts: string[] = [];
  parts.push(xAxis(xs, marginTop + panelH, "system size N"));
  parts.push(yAxis(ys, marginL, "quasi-steady current"));

  const overlays: Record<string, unknown>[] = [];
  fits.forEach((fit, fi) => {
    const color = seriesColor(fi);
    fit.sizes.forEach((n, i) => {
      parts.push(el("circle", { cx: xs(n), cy: ys(fit.currents[i]), r: 3.5,
                                fill: color }));
    });
    const nGrid: number[] = [];
    const [n0, n1] = [Math.min(...fit.sizes), Math.max(...fit.sizes)];
    for (let i = 0; i <= 40; i++) nGrid.push(n0 * (n1 / n0) ** (i / 40));
    if (fit.power) {
      const { amplitude, alpha } = fit.power;
      parts.push(polyline(
        nGrid.map((n) => [xs(n), ys(amplitude * n ** -alpha)] as [number, number]),
        color));
    }
    if (fit.exponential) {
      const { amplitude, beta } = fit.exponential;
      const pts = nGrid
        .map((n) => [n, amplitude * Math.exp(-beta * n)] as [number, number])
        .filter(([, v]) => v >= ys.domain[0])
        .map(([n, v]) => [xs(n), ys(v)] as [number, number]);
      if (pts.length > 1) parts.push(polyline(pts, color, true));
    }
    const ly = marginTop + 14 + 30 * fi;
    parts.push(el("circle", { cx: marginL + panelW + 18, cy: ly - 4, r: 3.5, fill: color }));
    parts.push(text(marginL + panelW + 28, ly, `Jz = ${fmt(fit.Jz)} (${fit.regime ?? "?"})`));
    if (fit.power) {
      parts.push(text(marginL + panelW + 28, ly + 12,
                      `alpha=${fmt(fit.power.alpha)} beta=${fmt(fit.exponential?.beta ?? NaN)}`,
                      { "font-size": 9, fill: "#555" }));
    }
    overlays.push({
      Jz: fit.Jz,
      power: fit.power ?? null,
      exponential: fit.exponential ?? null,
    });
  });

  const meta: FigureMeta = {
    kind: "scaling",
    config_sha256: agg.config_sha256,
    overlays,
  };
  return svgDocument(width, height, meta, parts.join(""));
}
