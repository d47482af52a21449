/** Parse the server's bands CSV into per-series extracts. The client never
 * computes epidemic quantities; it only regroups what the server sent. */

import type { ExtremaMarker, SeriesExtract } from "./types.js";

export function parseBandsCsv(text: string): Record<string, SeriesExtract> {
  const lines = text.trim().split("\n");
  if (lines.length === 0 || lines[0] !== "date,compartment,mean,p2_5,p97_5") {
    throw new Error(`unexpected bands header: ${lines[0] ?? "(empty)"}`);
  }
  const series: Record<string, SeriesExtract> = {};
  for (const line of lines.slice(1)) {
    const parts = line.split(",");
    if (parts.length !== 5) throw new Error(`malformed bands row: ${line}`);
    const [date, name, mean, low, high] = parts as [string, string, string, string, string];
    const slot = (series[name] ??= { name, dates: [], mean: [], low: [], high: [] });
    slot.dates.push(date);
    slot.mean.push(Number(mean));
    slot.low.push(Number(low));
    slot.high.push(Number(high));
  }
  return series;
}

interface ExtremaDoc {
  entries: {
    date: string;
    series: string;
    kind: "peak" | "valley";
    mean: number;
    ci_low: number;
    ci_high: number;
  }[];
}

export function parseExtrema(doc: ExtremaDoc): ExtremaMarker[] {
  return doc.entries.map((e) => ({
    date: e.date,
    series: e.series,
    kind: e.kind,
    mean: e.mean,
    ciLow: e.ci_low,
    ciHigh: e.ci_high,
  }));
}
