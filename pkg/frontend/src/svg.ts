/**
 * Minimal SVG emission. Everything is plain string concatenation; the
 * figures this package draws are a few hundred elements at most.
 */

export interface Box {
  left: number;
  top: number;
  width: number;
  height: number;
}

export function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function fmtCoord(v: number): string {
  return Number(v.toFixed(2)).toString();
}

export function el(
  tag: string,
  attrs: Record<string, string | number>,
  body = "",
): string {
  let out = "<" + tag;
  for (const key of Object.keys(attrs)) {
    const value = attrs[key];
    out += ` ${key}="${typeof value === "number" ? fmtCoord(value) : esc(value)}"`;
  }
  return body === "" ? out + "/>" : out + ">" + body + `</${tag}>`;
}

export function textEl(
  x: number,
  y: number,
  s: string,
  attrs: Record<string, string | number> = {},
): string {
  return el("text", { x, y, ...attrs }, esc(s));
}

export function polylineEl(
  xs: number[],
  ys: number[],
  stroke: string,
  extra: Record<string, string | number> = {},
): string {
  const points: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    if (Number.isFinite(xs[i]) && Number.isFinite(ys[i])) {
      points.push(`${fmtCoord(xs[i])},${fmtCoord(ys[i])}`);
    }
  }
  return el("polyline", {
    points: points.join(" "),
    fill: "none",
    stroke,
    "stroke-width": 1.6,
    ...extra,
  });
}

/** Compact tick label: plain text for moderate magnitudes, else 2e-3 form. */
export function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 0.01 && a < 10000) {
    return Number(v.toPrecision(6)).toString();
  }
  const exp = Math.floor(Math.log10(a));
  const mant = v / Math.pow(10, exp);
  const m = Number(mant.toPrecision(3));
  return m === 1 ? `1e${exp}` : m === -1 ? `-1e${exp}` : `${m}e${exp}`;
}

/** Round tick positions covering [lo, hi] on a 1/2/5 progression. */
export function linearTicks(lo: number, hi: number, want = 5): number[] {
  if (!(hi > lo)) {
    return [lo];
  }
  const rawStep = (hi - lo) / want;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = mag;
  for (const mult of [1, 2, 5, 10]) {
    if (mag * mult >= rawStep) {
      step = mag * mult;
      break;
    }
  }
  const ticks: number[] = [];
  let v = Math.ceil(lo / step) * step;
  for (; v <= hi + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

/** Decade ticks 10^k inside [lo, hi]; both endpoints must be positive. */
export function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let k = Math.ceil(Math.log10(lo) - 1e-9); ; k++) {
    const v = Math.pow(10, k);
    if (v > hi * (1 + 1e-9)) break;
    ticks.push(v);
  }
  return ticks;
}

export type ScaleKind = "linear" | "log";

export interface Scale {
  kind: ScaleKind;
  domain: [number, number];
  range: [number, number];
  map(v: number): number;
  ticks(): number[];
}

export function makeScale(
  kind: ScaleKind,
  domain: [number, number],
  range: [number, number],
): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  if (kind === "log" && (d0 <= 0 || d1 <= 0)) {
    throw new Error("log scale needs positive domain");
  }
  const t0 = kind === "log" ? Math.log10(d0) : d0;
  const t1 = kind === "log" ? Math.log10(d1) : d1;
  const span = t1 - t0 || 1;
  return {
    kind,
    domain,
    range,
    map(v: number): number {
      const t = kind === "log" ? Math.log10(v) : v;
      return r0 + ((t - t0) / span) * (r1 - r0);
    },
    ticks(): number[] {
      return kind === "log" ? decadeTicks(d0, d1) : linearTicks(d0, d1);
    },
  };
}

export const AXIS_COLOR = "#444444";
export const GRID_COLOR = "#dddddd";
const FONT = "font-family:Helvetica,Arial,sans-serif";

export interface PanelLabels {
  title: string;
  xLabel: string;
  yLabel: string;
}

/** Axes, grid lines, tick labels and titles for one plot panel. */
export function panelFrame(
  box: Box,
  xs: Scale,
  ys: Scale,
  labels: PanelLabels,
): string {
  const parts: string[] = [];
  const x0 = box.left;
  const x1 = box.left + box.width;
  const y0 = box.top + box.height;
  const y1 = box.top;
  for (const tick of xs.ticks()) {
    const px = xs.map(tick);
    parts.push(polylineEl([px, px], [y0, y1], GRID_COLOR, {
      "stroke-width": 0.5,
    }));
    parts.push(textEl(px, y0 + 16, fmtTick(tick), {
      "text-anchor": "middle",
      "font-size": 11,
      style: FONT,
      fill: AXIS_COLOR,
    }));
  }
  for (const tick of ys.ticks()) {
    const py = ys.map(tick);
    parts.push(polylineEl([x0, x1], [py, py], GRID_COLOR, {
      "stroke-width": 0.5,
    }));
    parts.push(textEl(x0 - 6, py + 4, fmtTick(tick), {
      "text-anchor": "end",
      "font-size": 11,
      style: FONT,
      fill: AXIS_COLOR,
    }));
  }
  parts.push(el("rect", {
    x: x0,
    y: y1,
    width: box.width,
    height: box.height,
    fill: "none",
    stroke: AXIS_COLOR,
    "stroke-width": 1,
  }));
  parts.push(textEl(x0 + box.width / 2, y1 - 8, labels.title, {
    "text-anchor": "middle",
    "font-size": 13,
    "font-weight": "bold",
    style: FONT,
    fill: "#222222",
  }));
  parts.push(textEl(x0 + box.width / 2, y0 + 34, labels.xLabel, {
    "text-anchor": "middle",
    "font-size": 12,
    style: FONT,
    fill: AXIS_COLOR,
  }));
  parts.push(el(
    "g",
    { transform: `translate(${x0 - 52},${y1 + box.height / 2}) rotate(-90)` },
    textEl(0, 0, labels.yLabel, {
      "text-anchor": "middle",
      "font-size": 12,
      style: FONT,
      fill: AXIS_COLOR,
    }),
  ));
  return parts.join("\n");
}

export interface LegendEntry {
  label: string;
  color: string;
  dashed?: boolean;
}

export function legend(x: number, y: number, entries: LegendEntry[]): string {
  const parts: string[] = [];
  entries.forEach((entry, i) => {
    const py = y + i * 16;
    parts.push(polylineEl([x, x + 18], [py, py], entry.color, {
      "stroke-width": 2,
      ...(entry.dashed ? { "stroke-dasharray": "5 3" } : {}),
    }));
    parts.push(textEl(x + 24, py + 4, entry.label, {
      "font-size": 11,
      style: FONT,
      fill: "#222222",
    }));
  });
  return parts.join("\n");
}

export function svgDocument(
  width: number,
  height: number,
  body: string,
): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    el("rect", { x: 0, y: 0, width, height, fill: "#ffffff" }),
    body,
    "</svg>",
    "",
  ].join("\n");
}
