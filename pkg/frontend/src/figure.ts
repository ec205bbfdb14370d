/**
 * Pure SVG figure builder: one curve per series value, a translucent band of
 * +-1 standard deviation where the schema provides one, log-scaled x axis
 * when the sweep spans at least two decades.  No timestamps, no randomness:
 * identical input yields identical bytes.
 */
import { SweepRow } from "./csv.js";

export type FigureKind = "smallest_eta" | "grad_norm" | "fraction_flipped";

export interface FigureSpec {
  figure: FigureKind;
  L: number;
  xAxis: "d" | "k";
}

export const FIGURE_KINDS: FigureKind[] = ["smallest_eta", "grad_norm", "fraction_flipped"];

const WIDTH = 640;
const HEIGHT = 420;
const MARGIN = { left: 64, right: 150, top: 44, bottom: 52 };
const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"];

const Y_LABEL: Record<FigureKind, string> = {
  smallest_eta: "mean smallest |eta|",
  grad_norm: "mean gradient norm",
  fraction_flipped: "fraction flipped",
};

interface Point {
  x: number;
  y: number;
  std: number | null;
}

function fmt(v: number): string {
  // Fixed-precision, locale-free formatting keeps output bytes stable.
  const s = v.toPrecision(6);
  return s.includes(".") ? s.replace(/\.?0+$/, "").replace(/\.?0+e/, "e") : s;
}

function pointsFor(rows: SweepRow[], spec: FigureSpec): Map<number, Point[]> {
  const seriesKey = spec.xAxis === "d" ? "k" : "d";
  const bySeries = new Map<number, Point[]>();
  for (const row of rows) {
    if (row.L !== spec.L) continue;
    let y: number | null;
    let std: number | null;
    if (spec.figure === "smallest_eta") {
      // Cells where no step flipped carry no eta statistics: omitted.
      y = row.mean_smallest_eta;
      std = row.std_smallest_eta;
    } else if (spec.figure === "grad_norm") {
      y = row.mean_grad_norm;
      std = row.std_grad_norm;
    } else {
      y = row.fraction_flipped;
      std = null;
    }
    if (y === null) continue;
    const series = row[seriesKey];
    if (!bySeries.has(series)) bySeries.set(series, []);
    bySeries.get(series)!.push({ x: row[spec.xAxis], y, std });
  }
  for (const pts of bySeries.values()) {
    pts.sort((a, b) => a.x - b.x);
  }
  return new Map([...bySeries.entries()].sort((a, b) => a[0] - b[0]));
}

interface Scale {
  (v: number): number;
  ticks: number[];
  log: boolean;
}

function makeXScale(values: number[]): Scale {
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const log = hi / lo >= 100; // two decades or more
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  if (log) {
    const llo = Math.log10(lo);
    const lhi = Math.log10(hi);
    const span = lhi - llo || 1;
    const scale = ((v: number) => x0 + ((Math.log10(v) - llo) / span) * (x1 - x0)) as Scale;
    const ticks: number[] = [];
    for (let p = Math.ceil(llo); p <= Math.floor(lhi); p += 1) ticks.push(10 ** p);
    scale.ticks = ticks.length >= 2 ? ticks : [lo, hi];
    scale.log = true;
    return scale;
  }
  const span = hi - lo || 1;
  const scale = ((v: number) => x0 + ((v - lo) / span) * (x1 - x0)) as Scale;
  scale.ticks = lo === hi ? [lo] : [0, 1, 2, 3, 4].map((i) => lo + (span * i) / 4);
  scale.log = false;
  return scale;
}

function makeYScale(values: number[]): Scale {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  const scale = ((v: number) => y0 + ((v - lo) / (hi - lo)) * (y1 - y0)) as Scale;
  scale.ticks = [0, 1, 2, 3, 4].map((i) => lo + ((hi - lo) * i) / 4);
  scale.log = false;
  return scale;
}

function polyline(pts: Point[], sx: Scale, sy: Scale): string {
  return pts.map((p) => `${fmt(sx(p.x))},${fmt(sy(p.y))}`).join(" ");
}

function bandPolygon(pts: Point[], sx: Scale, sy: Scale): string | null {
  if (!pts.every((p) => p.std !== null)) return null;
  const upper = pts.map((p) => `${fmt(sx(p.x))},${fmt(sy(p.y + (p.std as number)))}`);
  const lower = [...pts].reverse().map((p) => `${fmt(sx(p.x))},${fmt(sy(p.y - (p.std as number)))}`);
  return [...upper, ...lower].join(" ");
}

export function buildFigure(rows: SweepRow[], spec: FigureSpec): string {
  const seriesKey = spec.xAxis === "d" ? "k" : "d";
  const series = pointsFor(rows, spec);
  const allPoints = [...series.values()].flat();

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="15">` +
      `${Y_LABEL[spec.figure]} (L=${spec.L})</text>`,
  );

  if (allPoints.length === 0) {
    parts.push(
      `<text x="${WIDTH / 2}" y="${HEIGHT / 2}" text-anchor="middle" font-size="13" fill="#666">` +
        `no data for this figure</text>`,
    );
    parts.push("</svg>");
    return parts.join("\n") + "\n";
  }

  const sx = makeXScale(allPoints.map((p) => p.x));
  const yExtent = allPoints.flatMap((p) =>
    p.std === null ? [p.y] : [p.y - p.std, p.y + p.std],
  );
  const sy = makeYScale(yExtent);

  const axisY = HEIGHT - MARGIN.bottom;
  parts.push(
    `<line x1="${MARGIN.left}" y1="${axisY}" x2="${WIDTH - MARGIN.right}" y2="${axisY}" stroke="black"/>`,
  );
  parts.push(
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${axisY}" stroke="black"/>`,
  );
  for (const t of sx.ticks) {
    const px = fmt(sx(t));
    parts.push(`<line x1="${px}" y1="${axisY}" x2="${px}" y2="${axisY + 5}" stroke="black"/>`);
    parts.push(
      `<text x="${px}" y="${axisY + 18}" text-anchor="middle" font-size="11">${fmt(t)}</text>`,
    );
  }
  for (const t of sy.ticks) {
    const py = fmt(sy(t));
    parts.push(`<line x1="${MARGIN.left - 5}" y1="${py}" x2="${MARGIN.left}" y2="${py}" stroke="black"/>`);
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${py}" text-anchor="end" dominant-baseline="middle" ` +
        `font-size="11">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${(MARGIN.left + WIDTH - MARGIN.right) / 2}" y="${HEIGHT - 14}" ` +
      `text-anchor="middle" font-size="13">${spec.xAxis}${sx.log ? " (log scale)" : ""}</text>`,
  );

  let idx = 0;
  for (const [seriesValue, pts] of series) {
    const color = PALETTE[idx % PALETTE.length];
    const band = bandPolygon(pts, sx, sy);
    if (band !== null && pts.length > 1) {
      parts.push(`<polygon points="${band}" fill="${color}" fill-opacity="0.15" stroke="none"/>`);
    }
    if (pts.length > 1) {
      parts.push(
        `<polyline points="${polyline(pts, sx, sy)}" fill="none" stroke="${color}" stroke-width="1.8"/>`,
      );
    }
    for (const p of pts) {
      parts.push(`<circle cx="${fmt(sx(p.x))}" cy="${fmt(sy(p.y))}" r="3" fill="${color}"/>`);
    }
    const ly = MARGIN.top + 16 * idx;
    const lx = WIDTH - MARGIN.right + 12;
    parts.push(`<line x1="${lx}" y1="${ly}" x2="${lx + 18}" y2="${ly}" stroke="${color}" stroke-width="2"/>`);
    parts.push(
      `<text x="${lx + 24}" y="${ly}" dominant-baseline="middle" font-size="11">` +
        `${seriesKey}=${fmt(seriesValue)}</text>`,
    );
    idx += 1;
  }

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
