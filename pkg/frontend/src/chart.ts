/** Dependency-free SVG rendering of the estimated-effectiveness
 * trajectory: one point per validated document, y in [0, 1]. */

import type { FBetaEstimate, TrajectoryPoint } from './types.js';

export type Averaging = 'macro' | 'micro';

export interface ChartOptions {
  width?: number;
  height?: number;
  padding?: number;
}

export interface ChartPoint {
  /** Validated count (0 = before any validation). */
  n: number;
  value: number;
}

/** Flatten a trajectory into (validated count, estimate) pairs for one
 * averaging mode, prefixed with the pre-validation estimate when known. */
export function chartSeries(
  trajectory: readonly TrajectoryPoint[],
  averaging: Averaging,
  initial: FBetaEstimate | null = null,
): ChartPoint[] {
  const points: ChartPoint[] = [];
  const start = initial?.[averaging];
  if (start !== undefined) {
    points.push({ n: 0, value: start });
  }
  trajectory.forEach((point, index) => {
    const value = point.f_beta[averaging];
    if (value !== undefined) {
      points.push({ n: index + 1, value });
    }
  });
  return points;
}

const svgEscape = (value: string): string =>
  value.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');

/** Render a polyline chart as an SVG string. */
export function renderTrajectorySvg(
  points: readonly ChartPoint[],
  label: string,
  options: ChartOptions = {},
): string {
  const width = options.width ?? 480;
  const height = options.height ?? 200;
  const pad = options.padding ?? 28;
  const maxN = Math.max(1, ...points.map((p) => p.n));
  const x = (n: number) => pad + ((width - 2 * pad) * n) / maxN;
  const y = (v: number) => height - pad - (height - 2 * pad) * Math.min(1, Math.max(0, v));
  const path = points.map((p) => `${x(p.n).toFixed(1)},${y(p.value).toFixed(1)}`).join(' ');
  const latest = points.length > 0 ? points[points.length - 1].value.toFixed(3) : '–';
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" role="img">`,
    `<rect x="${pad}" y="${pad}" width="${width - 2 * pad}" height="${height - 2 * pad}"`,
    ` fill="none" stroke="#ccc"/>`,
    points.length > 1 ? `<polyline points="${path}" fill="none" stroke="#2563eb" stroke-width="2"/>` : '',
    ...points.map(
      (p) => `<circle cx="${x(p.n).toFixed(1)}" cy="${y(p.value).toFixed(1)}" r="2.5" fill="#2563eb"/>`,
    ),
    `<text x="${pad}" y="${pad - 8}" font-size="11">${svgEscape(label)} (latest: ${latest})</text>`,
    `<text x="${pad - 4}" y="${height - pad + 12}" font-size="10" text-anchor="end">0</text>`,
    `<text x="${width - pad}" y="${height - pad + 12}" font-size="10" text-anchor="end">${maxN}</text>`,
    `</svg>`,
  ]
    .filter((part) => part !== '')
    .join('');
}
