/** Tiny SVG chart builders. No chart library: the shapes needed here are a
 * couple of polylines, a cursor line and some horizontal bars, and hand
 * rolling them keeps the dashboard dependency-free.
 */

import type { Cell } from "./api.js";

export interface ChartBox {
  width: number;
  height: number;
  padX: number;
  padY: number;
}

export const TIMELINE_BOX: ChartBox = { width: 640, height: 120, padX: 8, padY: 10 };

export function xFor(ordinal: number, count: number, box: ChartBox): number {
  const span = box.width - 2 * box.padX;
  if (count <= 1) return box.padX + span / 2;
  return box.padX + (ordinal / (count - 1)) * span;
}

function yFor(value: number, lo: number, hi: number, box: ChartBox): number {
  const span = box.height - 2 * box.padY;
  const t = hi > lo ? (value - lo) / (hi - lo) : 0.5;
  return box.height - box.padY - t * span;
}

export function finiteRange(series: readonly Cell[][]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const line of series) {
    for (const v of line) {
      if (typeof v === "number" && Number.isFinite(v)) {
        if (v < lo) lo = v;
        if (v > hi) hi = v;
      }
    }
  }
  if (lo > hi) return [0, 1];
  return lo === hi ? [lo - 0.5, hi + 0.5] : [lo, hi];
}

/** Polyline points for one series; gaps (null cells) split the line. */
export function polylineSegments(
  line: readonly Cell[],
  lo: number,
  hi: number,
  box: ChartBox,
): string[] {
  const segments: string[] = [];
  let current: string[] = [];
  line.forEach((value, ordinal) => {
    if (typeof value === "number" && Number.isFinite(value)) {
      current.push(`${xFor(ordinal, line.length, box).toFixed(1)},${yFor(value, lo, hi, box).toFixed(1)}`);
    } else if (current.length > 0) {
      segments.push(current.join(" "));
      current = [];
    }
  });
  if (current.length > 0) segments.push(current.join(" "));
  return segments;
}

export function lineChartSvg(
  lines: { label: string; color: string; values: readonly Cell[] }[],
  cursorOrdinal: number,
  count: number,
  box: ChartBox = TIMELINE_BOX,
): string {
  const [lo, hi] = finiteRange(lines.map((l) => [...l.values]));
  const parts: string[] = [
    `<svg viewBox="0 0 ${box.width} ${box.height}" width="100%" height="${box.height}" role="img">`,
  ];
  for (const line of lines) {
    for (const points of polylineSegments(line.values, lo, hi, box)) {
      parts.push(
        `<polyline fill="none" stroke="${line.color}" stroke-width="1.5" points="${points}"/>`,
      );
    }
  }
  const cx = xFor(cursorOrdinal, count, box).toFixed(1);
  parts.push(
    `<line class="cursor" x1="${cx}" y1="0" x2="${cx}" y2="${box.height}" ` +
      `stroke="#e4572e" stroke-width="1.5"/>`,
  );
  parts.push("</svg>");
  return parts.join("");
}

export function barChartSvg(
  bars: { label: string; value: number | null }[],
  width = 220,
  rowHeight = 18,
): string {
  let hi = 0;
  for (const bar of bars) {
    if (bar.value !== null && Math.abs(bar.value) > hi) hi = Math.abs(bar.value);
  }
  const labelWidth = 90;
  const height = bars.length * rowHeight;
  const parts = [`<svg viewBox="0 0 ${width} ${height}" width="100%" height="${height}">`];
  bars.forEach((bar, i) => {
    const y = i * rowHeight;
    const text = bar.value === null ? "–" : formatValue(bar.value);
    const span = hi > 0 && bar.value !== null
      ? (Math.abs(bar.value) / hi) * (width - labelWidth - 4)
      : 0;
    parts.push(
      `<text x="0" y="${y + rowHeight - 6}" font-size="10">${escapeXml(bar.label)}</text>`,
      `<rect x="${labelWidth}" y="${y + 3}" width="${span.toFixed(1)}" height="${rowHeight - 8}" ` +
        `fill="${bar.value !== null && bar.value < 0 ? "#b2472c" : "#4292c6"}"/>`,
      `<title>${escapeXml(bar.label)}: ${text}</title>`,
    );
  });
  parts.push("</svg>");
  return parts.join("");
}

export function formatValue(value: number): string {
  if (Number.isInteger(value)) return value.toLocaleString("en-US");
  return value.toPrecision(4);
}

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
