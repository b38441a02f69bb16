import { describe, expect, it } from "vitest";

import {
  columnsWithPrefix,
  findColumn,
  numericColumn,
  parseCsv,
  textColumns,
} from "../src/csv";

const SAMPLE = [
  "t (a.u.),err_l2 (1),bound_grad_y (1)",
  "0,0,0",
  "0.5,0.0001,0.0002",
  "1,0.00030000000000000003,0.0004",
].join("\n") + "\n";

describe("parseCsv", () => {
  it("splits header and rows", () => {
    const table = parseCsv(SAMPLE);
    expect(table.header).toEqual([
      "t (a.u.)",
      "err_l2 (1)",
      "bound_grad_y (1)",
    ]);
    expect(table.rows.length).toBe(3);
    expect(table.rows[1]).toEqual(["0.5", "0.0001", "0.0002"]);
  });

  it("rejects ragged rows with the line number", () => {
    const bad = "a,b\n1,2\n3\n";
    expect(() => parseCsv(bad)).toThrow("line 3: expected 2 cells, found 1");
  });

  it("rejects empty input", () => {
    expect(() => parseCsv("")).toThrow("empty CSV");
  });
});

describe("column access", () => {
  it("finds columns by exact header text", () => {
    const table = parseCsv(SAMPLE);
    expect(findColumn(table, "err_l2 (1)")).toBe(1);
    expect(findColumn(table, "err_l2")).toBe(-1);
  });

  it("names every missing column in one error", () => {
    const table = parseCsv(SAMPLE);
    expect(() => textColumns(table, ["t (a.u.)", "nope", "also"], "f.csv"))
      .toThrow('f.csv: missing column "nope", "also"');
  });

  it("parses 17-digit reprs back to the exact double", () => {
    const table = parseCsv(
      "v (1)\n0.10000000000000001\n2.2250738585072014e-308\n",
    );
    const got = numericColumn(table, "v (1)", "f.csv");
    expect(got[0]).toBe(0.1);
    expect(got[1]).toBe(2.2250738585072014e-308);
  });

  it("accepts nan cells and rejects garbage", () => {
    const table = parseCsv("v (1)\nnan\n");
    expect(Number.isNaN(numericColumn(table, "v (1)", "f.csv")[0])).toBe(true);
    const bad = parseCsv("v (1)\npotato\n");
    expect(() => numericColumn(bad, "v (1)", "f.csv"))
      .toThrow('f.csv: column "v (1)" line 2: not a number: "potato"');
  });

  it("lists prefixed columns in header order", () => {
    const table = parseCsv("b_2 (1),a (1),b_1 (1)\n0,0,0\n");
    expect(columnsWithPrefix(table, "b_")).toEqual(["b_2 (1)", "b_1 (1)"]);
  });
});
