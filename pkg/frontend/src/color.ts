/** Client-side port of the server's color scale and frame computation.
 *
 * Playback recolors the map locally from the cached summary instead of
 * fetching /api/frame per step, so this module has to reproduce the
 * server's binning arithmetic exactly: same operation order on IEEE
 * doubles, same floor/clamp, same half-even rounding in ramp
 * interpolation. The parity test compares against the live server for
 * every ordinal.
 */

import type { Cell, Summary } from "./api.js";

export const DEFAULT_RAMP: readonly string[] = [
  "#eff3ff", "#c6dbef", "#9ecae1", "#6baed6", "#4292c6", "#2171b5", "#084594",
];
export const MISSING_COLOR = "#cccccc";

export type ScaleKind = "linear" | "quantile";

export interface ColorScale {
  kind: ScaleKind;
  bins: number;
  ramp: readonly string[];
  /** [min, max] for linear scales; the full sorted sample for quantile. */
  domain: readonly number[];
  missingColor: string;
}

function rgb(color: string): [number, number, number] {
  return [
    parseInt(color.slice(1, 3), 16),
    parseInt(color.slice(3, 5), 16),
    parseInt(color.slice(5, 7), 16),
  ];
}

/** Round halves to the even neighbour (for non-negative inputs). */
function roundHalfEven(x: number): number {
  const floor = Math.floor(x);
  if (x - floor !== 0.5) return Math.round(x);
  return floor % 2 === 0 ? floor : floor + 1;
}

export function makeRamp(bins: number, anchors: readonly string[] = DEFAULT_RAMP): string[] {
  if (bins < 2) throw new Error(`a ramp needs at least 2 colors, got ${bins}`);
  if (bins === anchors.length) return [...anchors];
  const points = anchors.map(rgb);
  const out: string[] = [];
  for (let i = 0; i < bins; i++) {
    const x = (i * (points.length - 1)) / (bins - 1);
    const lo = Math.min(Math.floor(x), points.length - 2);
    const frac = x - lo;
    const a = points[lo]!;
    const b = points[lo + 1]!;
    const channels = a.map((av, c) => roundHalfEven(av + (b[c]! - av) * frac));
    out.push("#" + channels.map((v) => v.toString(16).padStart(2, "0")).join(""));
  }
  return out;
}

function finite(value: Cell): value is number {
  return typeof value === "number" && Number.isFinite(value);
}

function bisectRight(sorted: readonly number[], value: number): number {
  let lo = 0;
  let hi = sorted.length;
  while (lo < hi) {
    const mid = (lo + hi) >>> 1;
    if (value < sorted[mid]!) hi = mid;
    else lo = mid + 1;
  }
  return lo;
}

export function binIndex(value: number, scale: ColorScale): number {
  if (!Number.isFinite(value)) throw new Error(`binIndex needs a finite value, got ${value}`);
  let raw: number;
  if (scale.kind === "linear") {
    const vmin = scale.domain[0]!;
    const vmax = scale.domain[1]!;
    const position = ((value - vmin) / (vmax - vmin)) * scale.bins;
    raw = Math.floor(Math.min(Math.max(position, 0.0), scale.bins - 1.0));
  } else {
    const n = scale.domain.length;
    const rank = bisectRight(scale.domain, value) - 1;
    raw = Math.floor((Math.max(0, rank) * scale.bins) / n);
  }
  return Math.min(Math.max(raw, 0), scale.bins - 1);
}

export function colorFor(value: Cell, scale: ColorScale): string {
  if (!finite(value)) return scale.missingColor;
  return scale.ramp[binIndex(value, scale)]!;
}

function trackMatrix(summary: Summary, track: string): Cell[][] {
  const entry = summary.tracks.find((t) => t.name === track);
  if (!entry) throw new Error(`track '${track}' is not in the summary`);
  return entry.values;
}

/** Scale spanning the track's whole region x period range (same fallbacks
 * as the server: no finite values -> [0, 1], single value v -> [v, v+1]). */
export function scaleForTrack(
  summary: Summary,
  track: string,
  kind: ScaleKind = "linear",
  bins = 7,
): ColorScale {
  const values: number[] = [];
  for (const row of trackMatrix(summary, track)) {
    for (const v of row) if (finite(v)) values.push(v);
  }
  const ramp = makeRamp(bins);
  if (kind === "quantile" && values.length > 0) {
    return {
      kind,
      bins,
      ramp,
      domain: [...values].sort((a, b) => a - b),
      missingColor: MISSING_COLOR,
    };
  }
  let vmin: number;
  let vmax: number;
  if (values.length === 0) {
    vmin = 0.0;
    vmax = 1.0;
  } else {
    vmin = values[0]!;
    vmax = values[0]!;
    for (const v of values) {
      if (v < vmin) vmin = v;
      if (v > vmax) vmax = v;
    }
    if (vmin === vmax) vmax = vmin + 1.0;
  }
  return { kind: "linear", bins, ramp, domain: [vmin, vmax], missingColor: MISSING_COLOR };
}

/** One period's region -> color assignment; equals the server's frame JSON. */
export function computeFrame(
  summary: Summary,
  ordinal: number,
  track: string,
  scale: ColorScale,
): Record<string, string> {
  if (!(ordinal >= 0 && ordinal < summary.n_periods)) {
    throw new Error(`ordinal ${ordinal} outside 0..${summary.n_periods - 1}`);
  }
  const matrix = trackMatrix(summary, track);
  const assignment: Record<string, string> = {};
  summary.regions.forEach((region, i) => {
    assignment[region] = colorFor(matrix[i]?.[ordinal] ?? null, scale);
  });
  return assignment;
}
