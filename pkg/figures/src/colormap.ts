/** Color maps for magnetization/current fields and line series. */

export type RGB = [number, number, number];

/** Piecewise-linear interpolation through a list of color stops. */
function interpolateStops(stops: RGB[], t: number): RGB {
  const x = Math.min(1, Math.max(0, t)) * (stops.length - 1);
  const i = Math.min(stops.length - 2, Math.floor(x));
  const f = x - i;
  const a = stops[i];
  const b = stops[i + 1];
  return [
    Math.round(a[0] + f * (b[0] - a[0])),
    Math.round(a[1] + f * (b[1] - a[1])),
    Math.round(a[2] + f * (b[2] - a[2])),
  ];
}

// blue -> white -> red, exactly symmetric about the midpoint: the warm side
// is the channel-swapped mirror of the cold side, so |v| and -|v| sit at the
// same distance from neutral
const _COLD: RGB[] = [
  [24, 84, 170],
  [96, 150, 205],
  [196, 218, 240],
];
const _CENTER: RGB = [247, 247, 247];
const DIVERGING_STOPS: RGB[] = [
  ..._COLD,
  _CENTER,
  ..._COLD.slice().reverse().map(([r, g, b]) => [b, g, r] as RGB),
];

/**
 * Diverging colormap symmetric about zero: value -vmax maps to deep blue,
 * 0 to near-white, +vmax to deep red.  Values outside [-vmax, vmax] clip.
 */
export function divergingColor(value: number, vmax: number): RGB {
  if (!isFinite(value)) {
    throw new Error(`cannot map non-finite value ${value}`);
  }
  if (vmax <= 0) {
    return interpolateStops(DIVERGING_STOPS, 0.5);
  }
  const t = (value / vmax + 1) / 2;
  return interpolateStops(DIVERGING_STOPS, t);
}

export function rgbToHex([r, g, b]: RGB): string {
  const h = (v: number) => v.toString(16).padStart(2, "0");
  return `#${h(r)}${h(g)}${h(b)}`;
}

/** Deterministic line palette for series overlays. */
export const SERIES_COLORS = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

export function seriesColor(index: number): string {
  return SERIES_COLORS[index % SERIES_COLORS.length];
}
