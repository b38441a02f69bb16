import { describe, expect, it } from "vitest";

import { fitPowerLaw } from "../src/fit";

describe("fitPowerLaw", () => {
  it("recovers an exact power law", () => {
    const xs = [0.04, 0.01, 0.0025];
    const ys = xs.map((x) => 3 * Math.sqrt(x));
    const fit = fitPowerLaw(xs, ys);
    expect(fit.slope).toBeCloseTo(0.5, 12);
    expect(fit.prefactor).toBeCloseTo(3, 12);
  });

  it("averages over noisy points instead of interpolating", () => {
    // symmetric multiplicative noise around y = x leaves the slope alone
    const xs = [1, 10, 100];
    const ys = [1 * 1.1, 10 / 1.1, 100 * 1.1];
    const fit = fitPowerLaw(xs, ys);
    expect(fit.slope).toBeCloseTo(1.0, 10);
  });

  it("rejects unusable input", () => {
    expect(() => fitPowerLaw([1, 2], [1])).toThrow("length mismatch");
    expect(() => fitPowerLaw([1], [1])).toThrow("at least two");
    expect(() => fitPowerLaw([1, -2], [1, 1])).toThrow("positive");
    expect(() => fitPowerLaw([1, 2], [1, 0])).toThrow("positive");
    expect(() => fitPowerLaw([3, 3], [1, 2])).toThrow("degenerate");
  });
});
