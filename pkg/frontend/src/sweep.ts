import { Table, columnsWithPrefix, numericColumn } from "./csv";
import { PowerFit, fitPowerLaw } from "./fit";
import {
  Box,
  legend,
  makeScale,
  panelFrame,
  polylineEl,
  svgDocument,
} from "./svg";
import { curveColor } from "./figure";

export interface SweepCurveDump {
  label: string;
  color: string;
  column: string;
  x: number[];
  y: number[];
  slope: number | null;
  prefactor: number | null;
}

export interface SweepFigureResult {
  svg: string;
  dump: { xColumn: string; curves: SweepCurveDump[] };
}

/**
 * Log-log rate plot for a sweep summary.csv: the parameter column on x,
 * one error curve per method on y, with a dashed least-squares power-law
 * overlay and the fitted slope in the legend. Points that are zero, nan
 * or negative are plotted nowhere and excluded from the fit; a method
 * needs at least two usable points for an overlay.
 */
export function sweepFigure(table: Table, source: string): SweepFigureResult {
  if (table.header.length === 0) {
    throw new Error(`${source}: empty header`);
  }
  const xColumn = table.header[0];
  const errColumns = columnsWithPrefix(table, "err_");
  if (errColumns.length === 0) {
    throw new Error(`${source}: missing column "err_* (1)"`);
  }
  const xsRaw = numericColumn(table, xColumn, source);

  const curves: SweepCurveDump[] = errColumns.map((column, i) => {
    const label = column.replace(/^err_/, "").replace(/ \(1\)$/, "");
    const ys = numericColumn(table, column, source);
    const fx: number[] = [];
    const fy: number[] = [];
    for (let k = 0; k < ys.length; k++) {
      if (xsRaw[k] > 0 && ys[k] > 0 && Number.isFinite(ys[k])) {
        fx.push(xsRaw[k]);
        fy.push(ys[k]);
      }
    }
    let fit: PowerFit | null = null;
    if (fx.length >= 2) {
      fit = fitPowerLaw(fx, fy);
    }
    return {
      label,
      color: curveColor(label, i),
      column,
      x: xsRaw,
      y: ys,
      slope: fit === null ? null : fit.slope,
      prefactor: fit === null ? null : fit.prefactor,
    };
  });

  const box: Box = { left: 80, top: 40, width: 420, height: 320 };
  let xLo = Infinity;
  let xHi = -Infinity;
  let yLo = Infinity;
  let yHi = -Infinity;
  for (const curve of curves) {
    for (let k = 0; k < curve.x.length; k++) {
      if (curve.x[k] > 0 && curve.y[k] > 0 && Number.isFinite(curve.y[k])) {
        xLo = Math.min(xLo, curve.x[k]);
        xHi = Math.max(xHi, curve.x[k]);
        yLo = Math.min(yLo, curve.y[k]);
        yHi = Math.max(yHi, curve.y[k]);
      }
    }
  }
  if (!Number.isFinite(xLo)) {
    throw new Error(`${source}: no positive data to plot`);
  }
  if (xHi === xLo) {
    xHi = xLo * 10;
  }
  const pad = Math.sqrt(10);
  const xs = makeScale("log", [xLo / 1.15, xHi * 1.15], [
    box.left,
    box.left + box.width,
  ]);
  const ys = makeScale("log", [yLo / pad, yHi * pad], [
    box.top + box.height,
    box.top,
  ]);

  const xLabel = xColumn.replace(/ \(1\)$/, "");
  const parts = [
    panelFrame(box, xs, ys, {
      title: "convergence rates",
      xLabel,
      yLabel: "final error",
    }),
  ];
  for (const curve of curves) {
    const px: number[] = [];
    const py: number[] = [];
    for (let k = 0; k < curve.x.length; k++) {
      if (curve.x[k] > 0 && curve.y[k] > 0 && Number.isFinite(curve.y[k])) {
        px.push(xs.map(curve.x[k]));
        py.push(ys.map(curve.y[k]));
      }
    }
    parts.push(polylineEl(px, py, curve.color, { "stroke-width": 1.2 }));
    for (let k = 0; k < px.length; k++) {
      parts.push(polylineEl(
        [px[k] - 2.6, px[k] + 2.6],
        [py[k], py[k]],
        curve.color,
        { "stroke-width": 5 },
      ));
    }
    if (curve.slope !== null && curve.prefactor !== null) {
      const fitY = (v: number) =>
        curve.prefactor! * Math.pow(v, curve.slope!);
      parts.push(polylineEl(
        [xs.map(xLo), xs.map(xHi)],
        [ys.map(fitY(xLo)), ys.map(fitY(xHi))],
        curve.color,
        { "stroke-dasharray": "6 4", "stroke-width": 1.2 },
      ));
    }
  }
  parts.push(legend(
    box.left + 12,
    box.top + 16,
    curves.map((curve) => ({
      label: curve.slope === null
        ? curve.label
        : `${curve.label}  (slope ${curve.slope.toFixed(2)})`,
      color: curve.color,
    })),
  ));

  const svg = svgDocument(
    box.left + box.width + 28,
    box.top + box.height + 58,
    parts.join("\n"),
  );
  return { svg, dump: { xColumn, curves } };
}
