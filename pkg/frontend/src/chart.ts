/** Minimal SVG chart geometry: linear scales, tick placement and path data.
 * No chart library; everything here is coordinate arithmetic. */

export type Scale = (value: number) => number;

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  return (value: number) => r0 + ((value - d0) / span) * (r1 - r0);
}

export function niceTicks(min: number, max: number, count = 5): number[] {
  if (!(max > min)) return [min];
  const step = Math.pow(10, Math.floor(Math.log10((max - min) / count)));
  const candidates = [step, 2 * step, 5 * step, 10 * step];
  const chosen = candidates.find((s) => (max - min) / s <= count) ?? 10 * step;
  const ticks: number[] = [];
  for (let v = Math.ceil(min / chosen) * chosen; v <= max; v += chosen) ticks.push(v);
  return ticks;
}

function segments(values: (number | null)[]): Array<[number, number]> {
  const spans: Array<[number, number]> = [];
  let start: number | null = null;
  for (let k = 0; k < values.length; k += 1) {
    const defined = values[k] !== null && values[k] !== undefined;
    if (defined && start === null) start = k;
    if (!defined && start !== null) {
      spans.push([start, k - 1]);
      start = null;
    }
  }
  if (start !== null) spans.push([start, values.length - 1]);
  return spans;
}

/** Polyline path data; gaps (null values) break the line. */
export function linePath(values: (number | null)[], x: Scale, y: Scale): string {
  const parts: string[] = [];
  for (const [from, to] of segments(values)) {
    for (let k = from; k <= to; k += 1) {
      const command = k === from ? "M" : "L";
      parts.push(`${command}${round(x(k))},${round(y(values[k] as number))}`);
    }
  }
  return parts.join("");
}

/** Closed band polygon between the low and high series. */
export function bandPath(
  low: (number | null)[],
  high: (number | null)[],
  x: Scale,
  y: Scale,
): string {
  const parts: string[] = [];
  for (const [from, to] of segments(high.map((v, k) => (v === null || low[k] === null ? null : v)))) {
    const forward: string[] = [];
    const backward: string[] = [];
    for (let k = from; k <= to; k += 1) {
      forward.push(`${round(x(k))},${round(y(high[k] as number))}`);
      backward.push(`${round(x(k))},${round(y(low[k] as number))}`);
    }
    parts.push(`M${forward.join("L")}L${backward.reverse().join("L")}Z`);
  }
  return parts.join("");
}

function round(value: number): number {
  return Math.round(value * 100) / 100;
}

export function extent(values: (number | null)[][]): [number, number] {
  let lo = Number.POSITIVE_INFINITY;
  let hi = Number.NEGATIVE_INFINITY;
  for (const row of values) {
    for (const v of row) {
      if (v === null || v === undefined) continue;
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  if (!Number.isFinite(lo)) return [0, 1];
  return [Math.min(lo, 0), hi];
}
