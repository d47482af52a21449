/** Scenario comparison: overlay per-scenario band series on a shared date
 * axis, attach extrema markers, and highlight capacity breach intervals. */

import { addDays, parseDay } from "./payload.js";
import type {
  BreachInterval,
  ChartSeries,
  ExtremaMarker,
  NamedResult,
} from "./types.js";

const PALETTE = [
  "#2563eb",
  "#dc2626",
  "#059669",
  "#d97706",
  "#7c3aed",
  "#0891b2",
  "#be185d",
  "#4d7c0f",
];

/** Deterministic color from the scenario id (stable across re-renders). */
export function colorFor(id: string): string {
  let hash = 0;
  for (const ch of id) hash = (hash * 31 + ch.charCodeAt(0)) >>> 0;
  return PALETTE[hash % PALETTE.length]!;
}

/** Consecutive days where the mean exceeds the threshold, as inclusive
 * date intervals. Pure axis/threshold geometry. */
export function breachIntervals(
  dates: string[],
  mean: (number | null)[],
  threshold: number,
): BreachInterval[] {
  const intervals: BreachInterval[] = [];
  let start: string | null = null;
  for (let k = 0; k < dates.length; k += 1) {
    const value = mean[k];
    const over = value !== null && value !== undefined && value > threshold;
    if (over && start === null) start = dates[k]!;
    if (!over && start !== null) {
      intervals.push({ startDate: start, endDate: dates[k - 1]! });
      start = null;
    }
  }
  if (start !== null) intervals.push({ startDate: start, endDate: dates[dates.length - 1]! });
  return intervals;
}

function unionAxis(results: NamedResult[], seriesName: string): string[] {
  let lo = Number.POSITIVE_INFINITY;
  let hi = Number.NEGATIVE_INFINITY;
  for (const result of results) {
    const extract = result.series[seriesName];
    if (!extract || extract.dates.length === 0) continue;
    lo = Math.min(lo, parseDay(extract.dates[0]!));
    hi = Math.max(hi, parseDay(extract.dates[extract.dates.length - 1]!));
  }
  if (!Number.isFinite(lo)) return [];
  const axis: string[] = [];
  const first = addDays("1970-01-01", lo);
  for (let d = 0; d <= hi - lo; d += 1) axis.push(addDays(first, d));
  return axis;
}

/** Overlay the named results for one series; breach intervals are computed
 * against the threshold only where that scenario has data. */
export function mergeComparison(
  results: NamedResult[],
  seriesName: string,
  threshold: number | null,
): ChartSeries[] {
  if (results.length === 0) throw new Error("nothing to compare");
  const axis = unionAxis(results, seriesName);
  return results.map((result) => {
    const extract = result.series[seriesName];
    const byDate = new Map<string, number>();
    extract?.dates.forEach((d, k) => byDate.set(d, k));
    const mean: (number | null)[] = [];
    const low: (number | null)[] = [];
    const high: (number | null)[] = [];
    for (const day of axis) {
      const k = byDate.get(day);
      mean.push(k === undefined ? null : extract!.mean[k]!);
      low.push(k === undefined ? null : extract!.low[k]!);
      high.push(k === undefined ? null : extract!.high[k]!);
    }
    return {
      scenarioId: result.id,
      label: result.label,
      color: colorFor(result.id),
      seriesName,
      dates: axis,
      mean,
      low,
      high,
      markers: result.extrema.filter((m) => m.series === seriesName),
      breaches: threshold === null ? [] : breachIntervals(axis, mean, threshold),
    };
  });
}

/** Count extrema markers per window epoch: epoch k spans from window k's
 * start to window k+1's start (the last epoch runs to the end of data). */
export function markersPerEpoch(
  markers: ExtremaMarker[],
  windowStarts: string[],
): number[] {
  const starts = windowStarts.map(parseDay).sort((a, b) => a - b);
  return starts.map((start, k) => {
    const end = k + 1 < starts.length ? starts[k + 1]! : Number.POSITIVE_INFINITY;
    return markers.filter((m) => {
      const day = parseDay(m.date);
      return day >= start && day < end;
    }).length;
  });
}
