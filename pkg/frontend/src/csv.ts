/**
 * Reader for the sweep CSV emitted by the measurement pipeline.
 *
 * Schema (fixed order):
 *   d,k,L,n_total,n_flipped,fraction_flipped,
 *   mean_smallest_eta,std_smallest_eta,mean_grad_norm,std_grad_norm
 *
 * Cells where nothing flipped carry empty strings in the eta columns; they
 * parse to null.
 */

export const CSV_COLUMNS = [
  "d",
  "k",
  "L",
  "n_total",
  "n_flipped",
  "fraction_flipped",
  "mean_smallest_eta",
  "std_smallest_eta",
  "mean_grad_norm",
  "std_grad_norm",
] as const;

export interface SweepRow {
  d: number;
  k: number;
  L: number;
  n_total: number;
  n_flipped: number;
  fraction_flipped: number;
  mean_smallest_eta: number | null;
  std_smallest_eta: number | null;
  mean_grad_norm: number;
  std_grad_norm: number;
}

export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

export class IoError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "IoError";
  }
}

function requireNumber(raw: string, column: string, line: number): number {
  const value = Number(raw);
  if (raw === "" || !Number.isFinite(value)) {
    throw new SchemaError(`line ${line}: column ${column} is not a number: ${JSON.stringify(raw)}`);
  }
  return value;
}

function optionalNumber(raw: string, column: string, line: number): number | null {
  return raw === "" ? null : requireNumber(raw, column, line);
}

export function parseSweepCsv(text: string): SweepRow[] {
  const lines = text.split("\n").filter((line) => line.trim() !== "");
  if (lines.length === 0) {
    throw new SchemaError("empty CSV");
  }
  const header = lines[0].split(",");
  for (const column of CSV_COLUMNS) {
    if (!header.includes(column)) {
      throw new SchemaError(`missing column: ${column}`);
    }
  }
  if (header.length !== CSV_COLUMNS.length) {
    throw new SchemaError(`expected ${CSV_COLUMNS.length} columns, got ${header.length}`);
  }
  const index = Object.fromEntries(CSV_COLUMNS.map((c) => [c, header.indexOf(c)]));
  return lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new SchemaError(`line ${i + 2}: expected ${header.length} cells, got ${cells.length}`);
    }
    const pick = (c: string) => cells[index[c]];
    return {
      d: requireNumber(pick("d"), "d", i + 2),
      k: requireNumber(pick("k"), "k", i + 2),
      L: requireNumber(pick("L"), "L", i + 2),
      n_total: requireNumber(pick("n_total"), "n_total", i + 2),
      n_flipped: requireNumber(pick("n_flipped"), "n_flipped", i + 2),
      fraction_flipped: requireNumber(pick("fraction_flipped"), "fraction_flipped", i + 2),
      mean_smallest_eta: optionalNumber(pick("mean_smallest_eta"), "mean_smallest_eta", i + 2),
      std_smallest_eta: optionalNumber(pick("std_smallest_eta"), "std_smallest_eta", i + 2),
      mean_grad_norm: requireNumber(pick("mean_grad_norm"), "mean_grad_norm", i + 2),
      std_grad_norm: requireNumber(pick("std_grad_norm"), "std_grad_norm", i + 2),
    };
  });
}
