#!/usr/bin/env node
import { readFileSync, writeFileSync } from "node:fs";
import { basename } from "node:path";
import { parseArgs } from "node:util";

import { parseCsv } from "./csv";
import { CurveSource, errorFigure } from "./figure";
import { sweepFigure } from "./sweep";

const USAGE = `usage:
  plot error-figure --csv [label=]run.csv [--csv ...] --out figure.svg
                    [--bound <name>] [--dump arrays.json]
  plot sweep --csv summary.csv --out figure.svg [--dump arrays.json]

error-figure draws the measured err_l2 column of every input CSV next to
its a-priori bound column (bound_gradient_free by default, --bound picks
another). Labels default to the file basename; prefix "label=" to name a
curve explicitly, e.g. --csv blue=runs/blue/meanfield.csv. sweep draws a
log-log rate plot of a sweep summary.csv with fitted slopes.

--dump writes the plotted arrays as JSON, exactly as read from the CSV.
Exit codes: 0 ok, 2 bad invocation or malformed input.
`;

function loadCurve(arg: string): CurveSource {
  let label = "";
  let path = arg;
  const split = arg.indexOf("=");
  if (split > 0) {
    label = arg.slice(0, split);
    path = arg.slice(split + 1);
  }
  if (label === "") {
    label = basename(path).replace(/\.[^.]*$/, "");
  }
  const table = parseCsv(readFileSync(path, "utf-8"));
  return { label, source: path, table };
}

function requireOut(out: string | undefined): string {
  if (out === undefined) {
    throw new Error("--out is required");
  }
  if (!out.endsWith(".svg")) {
    throw new Error(`only .svg output is supported, got "${out}"`);
  }
  return out;
}

function writeDump(path: string | undefined, dump: unknown): void {
  if (path !== undefined) {
    writeFileSync(path, JSON.stringify(dump, null, 2) + "\n");
  }
}

export function main(argv: string[]): number {
  const command = argv[0];
  if (command === undefined || command === "--help" || command === "-h") {
    process.stdout.write(USAGE);
    return command === undefined ? 2 : 0;
  }
  try {
    if (command === "error-figure") {
      const { values } = parseArgs({
        args: argv.slice(1),
        options: {
          csv: { type: "string", multiple: true },
          out: { type: "string" },
          dump: { type: "string" },
          bound: { type: "string" },
        },
      });
      const files = values.csv ?? [];
      if (files.length === 0) {
        throw new Error("at least one --csv is required");
      }
      const out = requireOut(values.out);
      const inputs = files.map(loadCurve);
      const result = errorFigure(inputs, { bound: values.bound });
      writeFileSync(out, result.svg);
      writeDump(values.dump, result.dump);
      console.log(`plot: wrote ${out}`);
      return 0;
    }
    if (command === "sweep") {
      const { values } = parseArgs({
        args: argv.slice(1),
        options: {
          csv: { type: "string", multiple: true },
          out: { type: "string" },
          dump: { type: "string" },
        },
      });
      const files = values.csv ?? [];
      if (files.length !== 1) {
        throw new Error("sweep takes exactly one --csv");
      }
      const out = requireOut(values.out);
      const table = parseCsv(readFileSync(files[0], "utf-8"));
      const result = sweepFigure(table, files[0]);
      writeFileSync(out, result.svg);
      writeDump(values.dump, result.dump);
      console.log(`plot: wrote ${out}`);
      return 0;
    }
    throw new Error(`unknown command "${command}"`);
  } catch (err) {
    const message = err instanceof Error ? err.message : String(err);
    process.stderr.write(`plot: ${message}\n`);
    return 2;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
