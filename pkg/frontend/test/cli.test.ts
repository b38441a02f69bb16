import { existsSync, mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { main } from "../src/cli";
import { numericColumn, parseCsv, textColumns } from "../src/csv";
import { VARIANT_COLORS } from "../src/figure";

const FIXTURES = join(__dirname, "fixtures");
const PRESETS = ["blue", "red", "grey", "yellow"];

function outDir(): string {
  return mkdtempSync(join(tmpdir(), "plot-test-"));
}

describe("plot error-figure", () => {
  it("renders the four preset CSVs with variant colors", () => {
    const dir = outDir();
    const svgPath = join(dir, "figure.svg");
    const dumpPath = join(dir, "arrays.json");
    const args = ["error-figure"];
    for (const name of PRESETS) {
      args.push("--csv", `${name}=${join(FIXTURES, "presets", name + ".csv")}`);
    }
    args.push("--out", svgPath, "--dump", dumpPath);
    expect(main(args)).toBe(0);

    const svg = readFileSync(svgPath, "utf-8");
    for (const name of PRESETS) {
      expect(svg).toContain(`stroke="${VARIANT_COLORS[name]}"`);
    }
    expect(svg).toContain("measured error");
    expect(svg).toContain("error bound");

    // the dumped arrays are the CSV columns, value for value
    const dump = JSON.parse(readFileSync(dumpPath, "utf-8"));
    expect(dump.panels.length).toBe(2);
    for (const [p, column] of [
      [0, "err_l2 (1)"],
      [1, "bound_gradient_free (1)"],
    ] as const) {
      dump.panels[p].curves.forEach((curve: any, i: number) => {
        const table = parseCsv(readFileSync(
          join(FIXTURES, "presets", PRESETS[i] + ".csv"),
          "utf-8",
        ));
        expect(curve.label).toBe(PRESETS[i]);
        expect(curve.column).toBe(column);
        expect(curve.x).toEqual(numericColumn(table, "t_over_t1 (1)", "f"));
        expect(curve.y).toEqual(numericColumn(table, column, "f"));
      });
    }
  });

  it("defaults the curve label to the file basename", () => {
    const dir = outDir();
    const svgPath = join(dir, "one.svg");
    const dumpPath = join(dir, "one.json");
    const code = main([
      "error-figure",
      "--csv", join(FIXTURES, "presets", "blue.csv"),
      "--out", svgPath,
      "--dump", dumpPath,
    ]);
    expect(code).toBe(0);
    const dump = JSON.parse(readFileSync(dumpPath, "utf-8"));
    expect(dump.panels[0].curves[0].label).toBe("blue");
    expect(dump.panels[0].curves.length).toBe(1);
  });

  it("fails cleanly on a missing bound column", () => {
    const dir = outDir();
    const code = main([
      "error-figure",
      "--csv", join(FIXTURES, "presets", "blue.csv"),
      "--bound", "h1",
      "--out", join(dir, "x.svg"),
    ]);
    expect(code).toBe(2);
    expect(existsSync(join(dir, "x.svg"))).toBe(false);
  });
});

describe("plot sweep", () => {
  it("renders the sweep summary and matches the emitted rates", () => {
    const dir = outDir();
    const svgPath = join(dir, "rates.svg");
    const dumpPath = join(dir, "rates.json");
    const code = main([
      "sweep",
      "--csv", join(FIXTURES, "sweep", "summary.csv"),
      "--out", svgPath,
      "--dump", dumpPath,
    ]);
    expect(code).toBe(0);
    expect(readFileSync(svgPath, "utf-8")).toContain("stroke-dasharray");

    // cross-check the fitted slopes against the rates.csv written by the
    // producer of summary.csv
    const rates = parseCsv(readFileSync(
      join(FIXTURES, "sweep", "rates.csv"),
      "utf-8",
    ));
    const [methods] = textColumns(rates, ["method"], "rates.csv");
    const slopes = numericColumn(rates, "slope (1)", "rates.csv");
    const prefactors = numericColumn(rates, "prefactor (1)", "rates.csv");
    const dump = JSON.parse(readFileSync(dumpPath, "utf-8"));
    expect(methods.length).toBeGreaterThan(0);
    methods.forEach((method: string, i: number) => {
      const curve = dump.curves.find((c: any) => c.label === method);
      expect(curve, method).toBeDefined();
      expect(Math.abs(curve.slope - slopes[i])).toBeLessThan(1e-9);
      expect(Math.abs(curve.prefactor - prefactors[i]))
        .toBeLessThan(1e-9 * Math.abs(prefactors[i]));
    });
  });
});

describe("argument handling", () => {
  it("prints usage", () => {
    expect(main(["--help"])).toBe(0);
    expect(main([])).toBe(2);
  });

  it("rejects bad invocations", () => {
    const dir = outDir();
    expect(main(["frobnicate"])).toBe(2);
    expect(main(["error-figure", "--out", join(dir, "x.svg")])).toBe(2);
    expect(main([
      "error-figure",
      "--csv", join(FIXTURES, "presets", "blue.csv"),
    ])).toBe(2);
    expect(main([
      "error-figure",
      "--csv", join(FIXTURES, "presets", "blue.csv"),
      "--out", join(dir, "x.png"),
    ])).toBe(2);
    expect(main([
      "sweep",
      "--csv", join(FIXTURES, "sweep", "summary.csv"),
      "--csv", join(FIXTURES, "sweep", "summary.csv"),
      "--out", join(dir, "x.svg"),
    ])).toBe(2);
    expect(main([
      "error-figure",
      "--csv", join(dir, "does-not-exist.csv"),
      "--out", join(dir, "x.svg"),
    ])).toBe(2);
  });
});
