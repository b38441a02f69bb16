import {
  Table,
  columnsWithPrefix,
  findColumn,
  numericColumn,
} from "./csv";
import {
  Box,
  legend,
  makeScale,
  panelFrame,
  polylineEl,
  svgDocument,
} from "./svg";

/** One input CSV plus the name it should carry in the legend. */
export interface CurveSource {
  label: string;
  source: string;
  table: Table;
}

export interface FigureOptions {
  /** bound column override, as bare name ("weighted") or full header */
  bound?: string;
}

export interface CurveDump {
  label: string;
  color: string;
  source: string;
  column: string;
  x: number[];
  y: number[];
}

export interface PanelDump {
  title: string;
  xColumn: string;
  curves: CurveDump[];
}

export interface ErrorFigureResult {
  svg: string;
  dump: { panels: PanelDump[] };
}

// Curve colors keyed by the variant names of the preset family. Anything
// else cycles through the fallback palette.
export const VARIANT_COLORS: Record<string, string> = {
  blue: "#1f77b4",
  red: "#d62728",
  grey: "#7f7f7f",
  gray: "#7f7f7f",
  yellow: "#e0a800",
};

const FALLBACK_PALETTE = [
  "#17becf",
  "#9467bd",
  "#2ca02c",
  "#8c564b",
  "#e377c2",
  "#1a55a0",
];

export function curveColor(label: string, index: number): string {
  const key = label.trim().toLowerCase();
  if (key in VARIANT_COLORS) {
    return VARIANT_COLORS[key];
  }
  return FALLBACK_PALETTE[index % FALLBACK_PALETTE.length];
}

const TIME_SCALED = "t_over_t1 (1)";
const TIME_RAW = "t (a.u.)";
const ERR_COLUMN = "err_l2 (1)";
const PREFERRED_BOUND = "bound_gradient_free (1)";

function timeColumn(input: CurveSource): string {
  if (findColumn(input.table, TIME_SCALED) >= 0) {
    return TIME_SCALED;
  }
  if (findColumn(input.table, TIME_RAW) >= 0) {
    return TIME_RAW;
  }
  throw new Error(
    `${input.source}: missing column "${TIME_SCALED}" (or "${TIME_RAW}")`,
  );
}

function boundColumn(input: CurveSource, override?: string): string {
  if (override !== undefined) {
    const name = override.startsWith("bound_")
      ? override
      : `bound_${override}`;
    const full = name.endsWith(" (1)") ? name : `${name} (1)`;
    if (findColumn(input.table, full) < 0) {
      throw new Error(`${input.source}: missing column "${full}"`);
    }
    return full;
  }
  if (findColumn(input.table, PREFERRED_BOUND) >= 0) {
    return PREFERRED_BOUND;
  }
  const any = columnsWithPrefix(input.table, "bound_");
  if (any.length === 0) {
    throw new Error(
      `${input.source}: missing column "${PREFERRED_BOUND}" ` +
        "(no bound_* column present)",
    );
  }
  return any[0];
}

function collectPanel(
  title: string,
  inputs: CurveSource[],
  pickY: (input: CurveSource) => string,
): PanelDump {
  const curves: CurveDump[] = inputs.map((input, i) => {
    const column = pickY(input);
    return {
      label: input.label,
      color: curveColor(input.label, i),
      source: input.source,
      column,
      x: numericColumn(input.table, timeColumn(input), input.source),
      y: numericColumn(input.table, column, input.source),
    };
  });
  return { title, xColumn: timeColumn(inputs[0]), curves };
}

const PANEL_W = 380;
const PANEL_H = 300;
const MARGIN_L = 72;
const MARGIN_T = 40;
const MARGIN_B = 56;
const GAP = 72;

function drawPanel(panel: PanelDump, box: Box, yLabel: string): string {
  let xLo = Infinity;
  let xHi = -Infinity;
  let yHi = -Infinity;
  for (const curve of panel.curves) {
    for (const v of curve.x) {
      if (Number.isFinite(v)) {
        xLo = Math.min(xLo, v);
        xHi = Math.max(xHi, v);
      }
    }
    for (const v of curve.y) {
      if (Number.isFinite(v)) {
        yHi = Math.max(yHi, v);
      }
    }
  }
  if (!Number.isFinite(xLo) || !Number.isFinite(yHi)) {
    throw new Error(`panel "${panel.title}": no finite data to plot`);
  }
  if (xHi === xLo) {
    xHi = xLo + 1;
  }
  if (yHi <= 0) {
    yHi = 1;
  }
  const xs = makeScale("linear", [xLo, xHi], [box.left, box.left + box.width]);
  const ys = makeScale(
    "linear",
    [0, yHi * 1.05],
    [box.top + box.height, box.top],
  );
  const xLabel = panel.xColumn === TIME_SCALED ? "t / t1" : "t (a.u.)";
  const parts = [
    panelFrame(box, xs, ys, { title: panel.title, xLabel, yLabel }),
  ];
  for (const curve of panel.curves) {
    parts.push(polylineEl(
      curve.x.map((v) => xs.map(v)),
      curve.y.map((v) => ys.map(v)),
      curve.color,
    ));
  }
  parts.push(legend(
    box.left + 10,
    box.top + 14,
    panel.curves.map((curve) => ({ label: curve.label, color: curve.color })),
  ));
  return parts.join("\n");
}

/**
 * The two-panel figure: measured factorization error on the left, the
 * selected a-priori bound on the right, one curve per input CSV. Values
 * are plotted exactly as read; the dump carries the plotted arrays.
 */
export function errorFigure(
  inputs: CurveSource[],
  options: FigureOptions = {},
): ErrorFigureResult {
  if (inputs.length === 0) {
    throw new Error("errorFigure: no input CSVs");
  }
  const measured = collectPanel("measured error", inputs, () => {
    return ERR_COLUMN;
  });
  const bound = collectPanel("error bound", inputs, (input) => {
    return boundColumn(input, options.bound);
  });

  const leftBox: Box = {
    left: MARGIN_L,
    top: MARGIN_T,
    width: PANEL_W,
    height: PANEL_H,
  };
  const rightBox: Box = {
    left: MARGIN_L + PANEL_W + GAP,
    top: MARGIN_T,
    width: PANEL_W,
    height: PANEL_H,
  };
  const width = rightBox.left + PANEL_W + 24;
  const height = MARGIN_T + PANEL_H + MARGIN_B;
  const svg = svgDocument(
    width,
    height,
    [
      drawPanel(measured, leftBox, "L2 error"),
      drawPanel(bound, rightBox, "bound"),
    ].join("\n"),
  );
  return { svg, dump: { panels: [measured, bound] } };
}
