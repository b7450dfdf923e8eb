/** Space-time color plots of the magnetization and bond currents. */

import { Trajectory } from "../csv.js";
import { divergingColor, rgbToHex } from "../colormap.js";
import { el, fmt, linearScale, svgDocument, text, xAxis, FigureMeta } from "../svg.js";

export interface HeatmapOptions {
  traj: Trajectory;
  configHash: string;
  /** "z", "q", or "both" (default) */
  field?: "z" | "q" | "both";
}

interface Panel {
  title: string;
  values: number[][]; // [time][cell]
  vmax: number;
  cells: number;
}

function panelFor(traj: Trajectory, field: "z" | "q"): Panel {
  if (field === "z") {
    return { title: "site magnetization", values: traj.z, vmax: 1.0, cells: traj.sites };
  }
  let vmax = 0;
  for (const row of traj.q) for (const v of row) vmax = Math.max(vmax, Math.abs(v));
  return {
    title: "bond current",
    values: traj.q,
    vmax: vmax || 1.0,
    cells: traj.sites - 1,
  };
}

function renderPanel(panel: Panel, traj: Trajectory, x0: number, y0: number,
                     w: number, h: number): string {
  const parts: string[] = [];
  const nT = traj.times.length;
  const cellW = w / nT;
  const cellH = h / panel.cells;
  for (let ti = 0; ti < nT; ti++) {
    for (let ci = 0; ci < panel.cells; ci++) {
      const color = rgbToHex(divergingColor(panel.values[ti][ci], panel.vmax));
      parts.push(el("rect", {
        x: x0 + ti * cellW,
        // site 1 at the bottom, like a space-time diagram
        y: y0 + h - (ci + 1) * cellH,
        width: cellW + 0.5,
        height: cellH + 0.5,
        fill: color,
      }));
    }
  }
  const tScale = linearScale([traj.times[0], traj.times[nT - 1]], [x0, x0 + w]);
  parts.push(xAxis(tScale, y0 + h, "t J"));
  parts.push(text(x0 - 8, y0 + h + 3, "1", { "text-anchor": "end" }));
  parts.push(text(x0 - 8, y0 + 9, String(panel.cells), { "text-anchor": "end" }));
  parts.push(text(x0 + w / 2, y0 - 8, `${panel.title} (|v| <= ${fmt(panel.vmax)})`,
                  { "text-anchor": "middle", "font-weight": "bold" }));
  // color bar
  const barX = x0 + w + 12;
  const steps = 32;
  for (let i = 0; i < steps; i++) {
    const v = panel.vmax * (1 - (2 * i) / (steps - 1));
    parts.push(el("rect", {
      x: barX, y: y0 + (i * h) / steps, width: 10, height: h / steps + 0.5,
      fill: rgbToHex(divergingColor(v, panel.vmax)),
    }));
  }
  parts.push(text(barX + 14, y0 + 8, `+${fmt(panel.vmax)}`));
  parts.push(text(barX + 14, y0 + h, `-${fmt(panel.vmax)}`));
  return parts.join("");
}

export function renderHeatmap(opts: HeatmapOptions): string {
  const field = opts.field ?? "both";
  const panels: Panel[] = field === "both"
    ? [panelFor(opts.traj, "z"), panelFor(opts.traj, "q")]
    : [panelFor(opts.traj, field)];
  const panelW = 420;
  const panelH = 240;
  const marginL = 56;
  const marginTop = 36;
  const gap = 86;
  const width = marginL + panels.length * (panelW + gap);
  const height = marginTop + panelH + 56;
  const body = panels
    .map((p, i) => renderPanel(p, opts.traj, marginL + i * (panelW + gap), marginTop,
                               panelW, panelH))
    .join("");
  const meta: FigureMeta = {
    kind: "heatmap",
    config_sha256: opts.configHash,
    field,
    times: opts.traj.times.length,
    sites: opts.traj.sites,
  };
  return svgDocument(width, height, meta, body);
}
