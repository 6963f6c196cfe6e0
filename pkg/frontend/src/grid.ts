/** Parsing of the service's map artifacts (coverage CSV, classification CSV)
 * into dense cell grids the overlay renderer can draw 1:1. */

export const COVERAGE_HEADER =
  "x_m,y_m,z_m,gain_db,ue_ris_power_db,p_target_dbm,p_tx_dbm,status";
export const CLASSIFICATION_HEADER = "x_m,y_m,z_m,category,reduction_db";

export type CoverageStatusName =
  "COVERED" | "COVERED_MIN_POWER" | "OUT_OF_COVERAGE";

export interface CoverageCell {
  x_m: number;
  y_m: number;
  z_m: number;
  gain_db: number;
  ue_ris_power_db: number | null;
  p_target_dbm: number | null;
  p_tx_dbm: number | null;
  status: CoverageStatusName;
}

export interface ClassifiedCell {
  x_m: number;
  y_m: number;
  z_m: number;
  category: string;
  reduction_db: number | null;
}

export interface GridShape {
  xs: number[];          // sorted unique x coordinates
  ys: number[];          // sorted unique y coordinates
  step_m: number;
}

export interface CoverageGrid {
  shape: GridShape;
  cells: CoverageCell[];     // row-major over (y, x), as served
}

export interface ClassificationGrid {
  shape: GridShape;
  cells: ClassifiedCell[];
}

function parseOptional(field: string): number | null {
  return field === "" ? null : Number(field);
}

function splitRows(csv: string, expectedHeader: string): string[][] {
  const lines = csv.split("\n").filter((line) => line.length > 0);
  if (lines.length === 0 || lines[0] !== expectedHeader) {
    throw new Error(`unexpected CSV header: ${lines[0] ?? "<empty>"}`);
  }
  return lines.slice(1).map((line) => line.split(","));
}

function inferShape(cells: Array<{ x_m: number; y_m: number }>): GridShape {
  const xs = [...new Set(cells.map((c) => c.x_m))].sort((a, b) => a - b);
  const ys = [...new Set(cells.map((c) => c.y_m))].sort((a, b) => a - b);
  let step = Infinity;
  for (let i = 1; i < xs.length; i++) step = Math.min(step, xs[i] - xs[i - 1]);
  for (let i = 1; i < ys.length; i++) step = Math.min(step, ys[i] - ys[i - 1]);
  if (!isFinite(step)) step = 1;
  return { xs, ys, step_m: step };
}

export function parseCoverageCsv(csv: string): CoverageGrid {
  const cells = splitRows(csv, COVERAGE_HEADER).map((f): CoverageCell => ({
    x_m: Number(f[0]),
    y_m: Number(f[1]),
    z_m: Number(f[2]),
    gain_db: Number(f[3]),
    ue_ris_power_db: parseOptional(f[4]),
    p_target_dbm: parseOptional(f[5]),
    p_tx_dbm: parseOptional(f[6]),
    status: f[7] as CoverageStatusName,
  }));
  if (cells.length === 0) throw new Error("coverage CSV has no cells");
  return { shape: inferShape(cells), cells };
}

export function parseClassificationCsv(csv: string): ClassificationGrid {
  const cells = splitRows(csv, CLASSIFICATION_HEADER)
    .map((f): ClassifiedCell => ({
      x_m: Number(f[0]),
      y_m: Number(f[1]),
      z_m: Number(f[2]),
      category: f[3],
      reduction_db: parseOptional(f[4]),
    }));
  if (cells.length === 0) throw new Error("classification CSV has no cells");
  return { shape: inferShape(cells), cells };
}

/** Numeric columns a coverage overlay can display. */
export const COVERAGE_COLUMNS =
  ["gain_db", "ue_ris_power_db", "p_target_dbm", "p_tx_dbm"] as const;
export type CoverageColumn = (typeof COVERAGE_COLUMNS)[number];

export function columnRange(grid: CoverageGrid, column: CoverageColumn):
    { min: number; max: number } | null {
  let min = Infinity;
  let max = -Infinity;
  for (const cell of grid.cells) {
    const v = cell[column];
    if (v === null || !isFinite(v)) continue;
    if (v < min) min = v;
    if (v > max) max = v;
  }
  return min <= max ? { min, max } : null;
}
