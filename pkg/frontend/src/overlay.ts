/** Overlay construction: served cell values -> colored rectangles.
 *
 * The renderer is deliberately dumb: one rectangle per served cell, value
 * taken verbatim from the parsed artifact (no resampling or smoothing), so
 * what the planner reads in a tooltip is exactly what the service computed.
 */
import { categoryColor, rgbCss, sequentialColor } from "./colormap.js";
import type { ClassificationGrid, CoverageColumn, CoverageGrid } from "./grid.js";
import { columnRange } from "./grid.js";

export interface OverlayCell {
  x_m: number;              // cell center, world coordinates
  y_m: number;
  size_m: number;           // square cell edge (grid step)
  value: number | null;     // the served value, untouched
  color: string | null;     // fill; null renders as empty
  hatch: boolean;           // out-of-coverage marker
}

export interface OverlayModel {
  cells: OverlayCell[];
  legend:
    | { kind: "sequential"; column: string; min: number; max: number }
    | { kind: "categorical"; categories: string[] };
}

export function buildCoverageOverlay(grid: CoverageGrid,
                                     column: CoverageColumn): OverlayModel {
  const range = columnRange(grid, column) ?? { min: 0, max: 1 };
  const cells = grid.cells.map((cell): OverlayCell => {
    const value = cell[column];
    const missing = value === null || !isFinite(value);
    return {
      x_m: cell.x_m,
      y_m: cell.y_m,
      size_m: grid.shape.step_m,
      value: missing ? null : value,
      color: missing
        ? null
        : rgbCss(sequentialColor(value, range.min, range.max)),
      hatch: cell.status === "OUT_OF_COVERAGE",
    };
  });
  return {
    cells,
    legend: { kind: "sequential", column, min: range.min, max: range.max },
  };
}

export function buildClassificationOverlay(grid: ClassificationGrid):
    OverlayModel {
  const seen = new Set<string>();
  const cells = grid.cells.map((cell): OverlayCell => {
    seen.add(cell.category);
    return {
      x_m: cell.x_m,
      y_m: cell.y_m,
      size_m: grid.shape.step_m,
      value: cell.reduction_db,
      color: categoryColor(cell.category),
      hatch: false,
    };
  });
  return {
    cells,
    legend: { kind: "categorical", categories: [...seen].sort() },
  };
}

/** The cell under a world coordinate, for tooltips.  Exact nearest-cell
 * lookup; returns null outside the grid footprint. */
export function cellAt(model: OverlayModel, x: number, y: number):
    OverlayCell | null {
  let best: OverlayCell | null = null;
  let bestDist = Infinity;
  for (const cell of model.cells) {
    const d = Math.max(Math.abs(cell.x_m - x), Math.abs(cell.y_m - y));
    if (d < bestDist) {
      bestDist = d;
      best = cell;
    }
  }
  if (best && bestDist <= best.size_m / 2 + 1e-12) return best;
  return null;
}
