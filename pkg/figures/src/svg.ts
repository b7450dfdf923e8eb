/** Minimal deterministic SVG construction: elements, scales, axes. */

export function fmt(x: number): string {
  if (!isFinite(x)) throw new Error(`cannot format non-finite ${x}`);
  if (x === 0) return "0";
  const s = x.toPrecision(7);
  return s.includes(".") || s.includes("e")
    ? String(Number(s))
    : s;
}

export function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function el(name: string, attrs: Record<string, string | number>, body = ""): string {
  const a = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === "number" ? fmt(v) : esc(String(v))}"`)
    .join(" ");
  return body === "" ? `<${name} ${a}/>` : `<${name} ${a}>${body}</${name}>`;
}

export function text(x: number, y: number, content: string,
                     extra: Record<string, string | number> = {}): string {
  return el("text", { x, y, "font-family": "sans-serif", "font-size": 11, ...extra },
            esc(content));
}

export interface Scale {
  (x: number): number;
  domain: [number, number];
  range: [number, number];
  ticks(n?: number): number[];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const f = ((x: number) => r0 + ((x - d0) / span) * (r1 - r0)) as Scale;
  f.domain = domain;
  f.range = range;
  f.ticks = (n = 5) => niceTicks(d0, d1, n);
  return f;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  if (d0 <= 0 || d1 <= 0) throw new Error("log scale needs positive domain");
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1);
  const span = l1 - l0 || 1;
  const [r0, r1] = range;
  const f = ((x: number) => r0 + ((Math.log10(x) - l0) / span) * (r1 - r0)) as Scale;
  f.domain = domain;
  f.range = range;
  f.ticks = () => {
    const ticks: number[] = [];
    for (let p = Math.floor(l0); p <= Math.ceil(l1); p++) {
      const v = 10 ** p;
      if (v >= d0 * 0.999 && v <= d1 * 1.001) ticks.push(v);
    }
    return ticks.length >= 2 ? ticks : [d0, d1];
  };
  return f;
}

export function niceTicks(lo: number, hi: number, n: number): number[] {
  if (lo === hi) return [lo];
  const rawStep = (hi - lo) / Math.max(1, n);
  const mag = 10 ** Math.floor(Math.log10(Math.abs(rawStep)));
  const norm = rawStep / mag;
  const step = (norm < 1.5 ? 1 : norm < 3.5 ? 2 : norm < 7.5 ? 5 : 10) * mag;
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

export function xAxis(scale: Scale, y: number, label: string): string {
  const parts: string[] = [];
  parts.push(el("line", {
    x1: scale.range[0], x2: scale.range[1], y1: y, y2: y, stroke: "#333",
  }));
  for (const t of scale.ticks()) {
    const x = scale(t);
    parts.push(el("line", { x1: x, x2: x, y1: y, y2: y + 4, stroke: "#333" }));
    parts.push(text(x, y + 15, fmt(t), { "text-anchor": "middle" }));
  }
  const mid = (scale.range[0] + scale.range[1]) / 2;
  parts.push(text(mid, y + 30, label, { "text-anchor": "middle", "font-style": "italic" }));
  return parts.join("");
}

export function yAxis(scale: Scale, x: number, label: string): string {
  const parts: string[] = [];
  parts.push(el("line", {
    x1: x, x2: x, y1: scale.range[0], y2: scale.range[1], stroke: "#333",
  }));
  for (const t of scale.ticks()) {
    const y = scale(t);
    parts.push(el("line", { x1: x - 4, x2: x, y1: y, y2: y, stroke: "#333" }));
    parts.push(text(x - 7, y + 3, fmt(t), { "text-anchor": "end" }));
  }
  const mid = (scale.range[0] + scale.range[1]) / 2;
  parts.push(text(12, mid, label, {
    "text-anchor": "middle", "font-style": "italic",
    transform: `rotate(-90 12 ${fmt(mid)})`,
  }));
  return parts.join("");
}

export function polyline(points: Array<[number, number]>, stroke: string,
                         dashed = false): string {
  const attrs: Record<string, string | number> = {
    points: points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" "),
    fill: "none",
    stroke,
    "stroke-width": 1.5,
  };
  if (dashed) attrs["stroke-dasharray"] = "5,3";
  return el("polyline", attrs);
}

export interface FigureMeta {
  kind: string;
  config_sha256: string;
  [key: string]: unknown;
}

/** Assemble the final document with the metadata block embedded. */
export function svgDocument(width: number, height: number, meta: FigureMeta,
                            body: string): string {
  const metaJson = JSON.stringify(meta);
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" data-config-hash="${esc(meta.config_sha256)}">`,
    `<metadata id="spinbattery-figure">${esc(metaJson)}</metadata>`,
    el("rect", { x: 0, y: 0, width, height, fill: "#ffffff" }),
    body,
    text(6, height - 6, `config ${meta.config_sha256.slice(0, 12)}`, {
      "font-size": 8, fill: "#999",
    }),
    `</svg>`,
  ].join("\n");
}

/** Recover the metadata object from a rendered figure (used by tests). */
export function readFigureMeta(svg: string): FigureMeta {
  const m = svg.match(/<metadata id="spinbattery-figure">([\s\S]*?)<\/metadata>/);
  if (!m) throw new Error("no figure metadata block found");
  const unescaped = m[1]
    .replace(/&quot;/g, '"')
    .replace(/&lt;/g, "<")
    .replace(/&gt;/g, ">")
    .replace(/&amp;/g, "&");
  return JSON.parse(unescaped) as FigureMeta;
}
