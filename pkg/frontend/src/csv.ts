/**
 * Reader for the CSV files duodyn emits: a single header line, comma
 * separated cells, no quoting. Numeric cells are printed by the producer
 * with enough digits that parsing them back is exact.
 */

export interface Table {
  header: string[];
  /** row-major raw cells, one string[] per data line */
  rows: string[][];
}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV");
  }
  const header = lines[0].split(",");
  const rows: string[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new Error(
        `line ${i + 1}: expected ${header.length} cells, found ${cells.length}`,
      );
    }
    rows.push(cells);
  }
  return { header, rows };
}

/** Index of a header entry, or -1. Matching is exact including units. */
export function findColumn(table: Table, name: string): number {
  return table.header.indexOf(name);
}

/**
 * The named columns as text, in the requested order. All missing names
 * are collected into one error so the caller sees the full list at once.
 */
export function textColumns(
  table: Table,
  names: string[],
  source: string,
): string[][] {
  const missing = names.filter((name) => findColumn(table, name) < 0);
  if (missing.length > 0) {
    const quoted = missing.map((name) => `"${name}"`).join(", ");
    throw new Error(`${source}: missing column ${quoted}`);
  }
  return names.map((name) => {
    const at = findColumn(table, name);
    return table.rows.map((row) => row[at]);
  });
}

export function numericColumn(
  table: Table,
  name: string,
  source: string,
): number[] {
  const [cells] = textColumns(table, [name], source);
  return cells.map((cell, i) => {
    const value = Number(cell);
    if (Number.isNaN(value) && cell.trim().toLowerCase() !== "nan") {
      throw new Error(
        `${source}: column "${name}" line ${i + 2}: not a number: "${cell}"`,
      );
    }
    return value;
  });
}

/** Header entries that start with the given prefix, in header order. */
export function columnsWithPrefix(table: Table, prefix: string): string[] {
  return table.header.filter((name) => name.startsWith(prefix));
}
