/** Top-down floorplan geometry: world <-> screen transform, wall footprints
 * and RIS drag handling.  The grid is a horizontal slice, so the plan view
 * projects everything onto the x-y plane. */
import type { SceneDocument, RisPlacement } from "./api.js";

export interface Viewport {
  width: number;
  height: number;
  scale: number;          // px per meter
  offsetX: number;        // world x of the left edge
  offsetY: number;        // world y of the BOTTOM edge (y grows up in world)
}

export interface Segment2d {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export interface Bounds {
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
}

export function sceneBounds(scene: SceneDocument): Bounds {
  let xMin = scene.grid.x_min;
  let xMax = scene.grid.x_max;
  let yMin = scene.grid.y_min;
  let yMax = scene.grid.y_max;
  for (const wall of scene.walls) {
    for (const v of wall.vertices) {
      xMin = Math.min(xMin, v[0]);
      xMax = Math.max(xMax, v[0]);
      yMin = Math.min(yMin, v[1]);
      yMax = Math.max(yMax, v[1]);
    }
  }
  const bs = scene.bs.reference_position;
  xMin = Math.min(xMin, bs[0]);
  xMax = Math.max(xMax, bs[0]);
  yMin = Math.min(yMin, bs[1]);
  yMax = Math.max(yMax, bs[1]);
  return { xMin, xMax, yMin, yMax };
}

export function fitViewport(bounds: Bounds, width: number, height: number,
                            marginPx = 20): Viewport {
  const spanX = Math.max(bounds.xMax - bounds.xMin, 1e-9);
  const spanY = Math.max(bounds.yMax - bounds.yMin, 1e-9);
  const scale = Math.min((width - 2 * marginPx) / spanX,
                         (height - 2 * marginPx) / spanY);
  // center the content
  const padX = (width / scale - spanX) / 2;
  const padY = (height / scale - spanY) / 2;
  return {
    width,
    height,
    scale,
    offsetX: bounds.xMin - padX,
    offsetY: bounds.yMin - padY,
  };
}

export function worldToScreen(vp: Viewport, x: number, y: number):
    [number, number] {
  return [(x - vp.offsetX) * vp.scale, vp.height - (y - vp.offsetY) * vp.scale];
}

export function screenToWorld(vp: Viewport, px: number, py: number):
    [number, number] {
  return [vp.offsetX + px / vp.scale, vp.offsetY + (vp.height - py) / vp.scale];
}

/** Plan-view footprint of each wall.  Vertical walls project to their x-y
 * extent; horizontal surfaces (floor/roof) are skipped. */
export function wallFootprints(scene: SceneDocument): Segment2d[] {
  const segments: Segment2d[] = [];
  for (const wall of scene.walls) {
    const xs = wall.vertices.map((v) => v[0]);
    const ys = wall.vertices.map((v) => v[1]);
    const zs = wall.vertices.map((v) => v[2]);
    const flat = Math.max(...zs) - Math.min(...zs) < 1e-9;
    if (flat) continue;     // floor or ceiling: no footprint line
    const spanX = Math.max(...xs) - Math.min(...xs);
    const spanY = Math.max(...ys) - Math.min(...ys);
    if (spanX < 1e-9 && spanY < 1e-9) continue;   // a post, not a wall
    if (spanX >= spanY) {
      segments.push({ x1: Math.min(...xs), y1: ys[0],
                      x2: Math.max(...xs), y2: ys[0] });
    } else {
      segments.push({ x1: xs[0], y1: Math.min(...ys),
                      x2: xs[0], y2: Math.max(...ys) });
    }
  }
  return segments;
}

/** Plan-view line of the RIS panel (perpendicular to its normal). */
export function risFootprint(ris: RisPlacement): Segment2d {
  const [nx, ny] = ris.normal;
  const len = (ris.cols * (ris.element_spacing_m ?? 0.2)) / 2;
  // in-plane direction = normal rotated 90 degrees in the x-y plane
  const tx = -ny;
  const ty = nx;
  const [cx, cy] = ris.center_position;
  return {
    x1: cx - tx * len, y1: cy - ty * len,
    x2: cx + tx * len, y2: cy + ty * len,
  };
}

/** Is a screen point within grabbing distance of the RIS marker? */
export function hitTestRis(vp: Viewport, ris: RisPlacement,
                           px: number, py: number, radiusPx = 12): boolean {
  const [cx, cy] = worldToScreen(vp, ris.center_position[0],
                                 ris.center_position[1]);
  return Math.hypot(px - cx, py - cy) <= radiusPx;
}

/** New placement after a drag: same orientation, moved center (z kept). */
export function movedPlacement(ris: RisPlacement, x: number, y: number):
    RisPlacement {
  return { ...ris, center_position: [x, y, ris.center_position[2]] };
}

/** New placement after a rotate gesture: normal turned to the given angle
 * in the x-y plane (panel stays upright). */
export function rotatedPlacement(ris: RisPlacement, angleRad: number):
    RisPlacement {
  return {
    ...ris,
    normal: [Math.cos(angleRad), Math.sin(angleRad), 0],
    up: [0, 0, 1],
  };
}
