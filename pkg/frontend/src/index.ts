export {
  Table,
  columnsWithPrefix,
  findColumn,
  numericColumn,
  parseCsv,
  textColumns,
} from "./csv";
export { PowerFit, fitPowerLaw } from "./fit";
export {
  CurveSource,
  ErrorFigureResult,
  VARIANT_COLORS,
  curveColor,
  errorFigure,
} from "./figure";
export { SweepFigureResult, sweepFigure } from "./sweep";
export { main } from "./cli";
