export interface PowerFit {
  slope: number;
  prefactor: number;
}

/**
 * Least-squares power law err = prefactor * value^slope, fitted as a
 * straight line in log-log coordinates. Same convention as the rates.csv
 * the sweep command writes, so the two can be compared directly.
 */
export function fitPowerLaw(values: number[], errs: number[]): PowerFit {
  if (values.length !== errs.length) {
    throw new Error("fitPowerLaw: length mismatch");
  }
  if (values.length < 2) {
    throw new Error("fitPowerLaw: need at least two points");
  }
  for (let i = 0; i < values.length; i++) {
    if (!(values[i] > 0) || !(errs[i] > 0)) {
      throw new Error("fitPowerLaw: values and errors must be positive");
    }
  }
  const n = values.length;
  let sx = 0;
  let sy = 0;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    const lx = Math.log(values[i]);
    const ly = Math.log(errs[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const denom = n * sxx - sx * sx;
  if (denom === 0) {
    throw new Error("fitPowerLaw: degenerate abscissae");
  }
  const slope = (n * sxy - sx * sy) / denom;
  const intercept = (sy - slope * sx) / n;
  return { slope, prefactor: Math.exp(intercept) };
}
