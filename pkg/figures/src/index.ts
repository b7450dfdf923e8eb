export { divergingColor, rgbToHex, seriesColor, SERIES_COLORS } from "./colormap.js";
export { parseTrajectory, parseFidelity } from "./csv.js";
export type { Trajectory, FidelitySeries } from "./csv.js";
export { readFigureMeta, svgDocument, fmt } from "./svg.js";
export { renderHeatmap } from "./figures/heatmap.js";
export { renderTraces } from "./figures/traces.js";
export { renderScaling } from "./figures/scaling.js";
export type { RegimeDiagram, FitEntry } from "./figures/scaling.js";
export { renderRegime } from "./figures/regime.js";
export { renderFidelity } from "./figures/fidelity.js";
export { parseArgs, renderFromArgs, main } from "./cli.js";
