/** File-level pipeline: CSV in, SVG out. */
import { readFileSync, writeFileSync } from "node:fs";

import { IoError, parseSweepCsv } from "./csv.js";
import { buildFigure, FigureSpec } from "./figure.js";

export function renderFile(csvPath: string, spec: FigureSpec, outPath: string): void {
  let text: string;
  try {
    text = readFileSync(csvPath, "utf-8");
  } catch (err) {
    throw new IoError(`cannot read ${csvPath}: ${(err as Error).message}`);
  }
  const svg = buildFigure(parseSweepCsv(text), spec);
  try {
    writeFileSync(outPath, svg, "utf-8");
  } catch (err) {
    throw new IoError(`cannot write ${outPath}: ${(err as Error).message}`);
  }
}
