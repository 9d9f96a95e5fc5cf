/** Reader for the sweep CSV schema produced by the simulator. */

import { readFileSync } from "node:fs";

export interface SweepTable {
  /** Column order as written in the header. */
  columns: string[];
  /** Raw cell strings, one record per data row, keyed by column. */
  rows: Record<string, string>[];
  /** Source path, used in error messages. */
  source: string;
}

export const REQUIRED_COLUMNS = [
  "snr_db",
  "n",
  "k",
  "epsilon",
  "trials",
  "seed",
  "nmse_r",
  "nmse_theta",
  "mean_iters",
  "conv_rate",
];

export function parseCsv(text: string, source: string): SweepTable {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error(`${source}: empty file`);
  }
  const columns = lines[0].split(",");
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== columns.length) {
      throw new Error(
        `${source}: row ${i + 1} has ${cells.length} cells, header has ${columns.length}`,
      );
    }
    const record: Record<string, string> = {};
    columns.forEach((name, j) => {
      record[name] = cells[j];
    });
    return record;
  });
  if (rows.length === 0) {
    throw new Error(`${source}: no data rows (header-only input)`);
  }
  return { columns, rows, source };
}

export function readCsv(path: string): SweepTable {
  return parseCsv(readFileSync(path, "utf8"), path);
}

/** Ensure the named columns exist, reporting the first missing one. */
export function requireColumns(table: SweepTable, names: string[]): void {
  for (const name of names) {
    if (!table.columns.includes(name)) {
      throw new Error(`${table.source}: missing column "${name}"`);
    }
  }
}

export function numeric(row: Record<string, string>, column: string): number {
  const value = Number(row[column]);
  if (!Number.isFinite(value)) {
    throw new Error(`non-numeric value "${row[column]}" in column "${column}"`);
  }
  return value;
}
