/** Color scales: a sequential ramp for dB maps (fixed min/max so overlays
 * stay comparable) and fixed categorical colors for the classification. */

export interface Rgb {
  r: number;
  g: number;
  b: number;
}

// dark blue -> cyan -> yellow anchors for the sequential ramp
const RAMP: Rgb[] = [
  { r: 13, g: 8, b: 135 },
  { r: 70, g: 3, b: 159 },
  { r: 114, g: 1, b: 168 },
  { r: 156, g: 23, b: 158 },
  { r: 189, g: 55, b: 134 },
  { r: 216, g: 87, b: 107 },
  { r: 237, g: 121, b: 83 },
  { r: 251, g: 159, b: 58 },
  { r: 253, g: 202, b: 38 },
  { r: 240, g: 249, b: 33 },
];

function lerp(a: number, b: number, t: number): number {
  return a + (b - a) * t;
}

/** Map a value onto the sequential ramp; out-of-range values clamp. */
export function sequentialColor(value: number, min: number, max: number): Rgb {
  const span = max > min ? max - min : 1;
  const t = Math.min(1, Math.max(0, (value - min) / span));
  const pos = t * (RAMP.length - 1);
  const i = Math.min(RAMP.length - 2, Math.floor(pos));
  const frac = pos - i;
  return {
    r: Math.round(lerp(RAMP[i].r, RAMP[i + 1].r, frac)),
    g: Math.round(lerp(RAMP[i].g, RAMP[i + 1].g, frac)),
    b: Math.round(lerp(RAMP[i].b, RAMP[i + 1].b, frac)),
  };
}

export function rgbCss({ r, g, b }: Rgb): string {
  return `rgb(${r},${g},${b})`;
}

/** Fixed categorical palette for the three classification outcomes. */
export const CATEGORY_COLORS: Record<string, string> = {
  NO_CHANGE: "rgb(120,120,120)",
  REDUCED_EXPOSURE: "rgb(46,160,67)",
  EXTENDED_COVERAGE: "rgb(31,111,235)",
};

export function categoryColor(category: string): string {
  const color = CATEGORY_COLORS[category];
  if (!color) throw new Error(`unknown classification category: ${category}`);
  return color;
}

/** Legend tick values for a sequential scale (min .. max inclusive). */
export function legendTicks(min: number, max: number, count = 5): number[] {
  const ticks: number[] = [];
  for (let i = 0; i < count; i++) {
    ticks.push(min + ((max - min) * i) / (count - 1));
  }
  return ticks;
}
