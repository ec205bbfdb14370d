#!/usr/bin/env node
/**
 * render --csv <path> --figure <name> --L <n> --out <path> [--x d|k]
 */
import { SchemaError, IoError } from "./csv.js";
import { FIGURE_KINDS, FigureKind, FigureSpec } from "./figure.js";
import { renderFile } from "./render.js";

const USAGE =
  "usage: advland-render --csv <path> --figure <smallest_eta|grad_norm|fraction_flipped> " +
  "--L <n> --out <path> [--x d|k]";

function parseArgs(argv: string[]): { csv: string; out: string; spec: FigureSpec } {
  const opts = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (!flag.startsWith("--") || value === undefined) {
      throw new Error(USAGE);
    }
    opts.set(flag.slice(2), value);
  }
  for (const required of ["csv", "figure", "L", "out"]) {
    if (!opts.has(required)) {
      throw new Error(`missing --${required}\n${USAGE}`);
    }
  }
  const figure = opts.get("figure") as FigureKind;
  if (!FIGURE_KINDS.includes(figure)) {
    throw new Error(`unknown figure ${JSON.stringify(opts.get("figure"))}\n${USAGE}`);
  }
  const xAxis = opts.get("x") ?? "d";
  if (xAxis !== "d" && xAxis !== "k") {
    throw new Error(`--x must be d or k\n${USAGE}`);
  }
  const L = Number(opts.get("L"));
  if (!Number.isInteger(L) || L < 1) {
    throw new Error(`--L must be a positive integer\n${USAGE}`);
  }
  return {
    csv: opts.get("csv")!,
    out: opts.get("out")!,
    spec: { figure, L, xAxis },
  };
}

export function main(argv: string[]): number {
  try {
    const { csv, out, spec } = parseArgs(argv);
    renderFile(csv, spec, out);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || err instanceof IoError) {
      process.stderr.write(`${err.name}: ${err.message}\n`);
      return 1;
    }
    process.stderr.write(`${(err as Error).message}\n`);
    return 2;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
