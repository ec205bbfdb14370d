import { describe, expect, it } from "vitest";

import { parseSweepCsv, SchemaError, CSV_COLUMNS } from "../src/csv.js";

export const FIXTURE = [
  CSV_COLUMNS.join(","),
  "100,100,1,400,400,1,1.17559But,0.62,0.701,0.045",
].join("\n");

const HEADER = CSV_COLUMNS.join(",");

export const GOOD_CSV = [
  HEADER,
  "100,100,1,400,400,1,1.17559,0.62,0.701,0.045",
  "300,100,1,400,398,0.995,1.21,0.66,0.699,0.044",
  "1000,100,1,400,390,0.975,1.19,0.61,0.702,0.046",
  "100,1000,1,400,400,1,1.18,0.60,0.706,0.015",
  "300,1000,1,400,400,1,1.20,0.63,0.707,0.014",
  "1000,1000,1,400,400,1,1.16,0.59,0.705,0.015",
  "100,100,2,400,0,0,,,0.52,0.05",
].join("\n") + "\n";

describe("parseSweepCsv", () => {
  it("parses all rows with exact columns", () => {
    const rows = parseSweepCsv(GOOD_CSV);
    expect(rows).toHaveLength(7);
    expect(rows[0]).toMatchObject({ d: 100, k: 100, L: 1, fraction_flipped: 1 });
  });

  it("maps empty eta cells to null", () => {
    const rows = parseSweepCsv(GOOD_CSV);
    const noFlip = rows[6];
    expect(noFlip.n_flipped).toBe(0);
    expect(noFlip.mean_smallest_eta).toBeNull();
    expect(noFlip.std_smallest_eta).toBeNull();
  });

  it("names the missing column", () => {
    const broken = GOOD_CSV.replace("mean_grad_norm", "grad_norm_mean");
    expect(() => parseSweepCsv(broken)).toThrowError(SchemaError);
    expect(() => parseSweepCsv(broken)).toThrowError(/missing column: mean_grad_norm/);
  });

  it("rejects ragged rows", () => {
    const ragged = GOOD_CSV + "1,2,3\n";
    expect(() => parseSweepCsv(ragged)).toThrowError(SchemaError);
  });

  it("rejects non-numeric required cells", () => {
    expect(() => parseSweepCsv(FIXTURE)).toThrowError(/mean_smallest_eta/);
  });

  it("rejects empty input", () => {
    expect(() => parseSweepCsv("")).toThrowError(SchemaError);
  });
});
