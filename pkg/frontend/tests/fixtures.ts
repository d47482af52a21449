/** Shared draft/series fixtures for the planner tests. */

import type { NamedResult, RatesDoc, ScenarioDraft, SeriesExtract } from "../src/types.js";

export const SLOW_RATES: RatesDoc = {
  beta: 0.3, s_q: 0, q_s: 0, i_l: 0.2, i_r: 0.17, i_h: 0.024, i_u: 0.006,
  h_u: 0.05, h_f: 0.015, h_a: 0.12, u_f: 0.04, u_hu: 0.08, hu_a: 0.1,
};

export function emptyDraft(): ScenarioDraft {
  return {
    name: "phased plan",
    population: {
      p_total: 900000,
      start_date: "2020-09-01",
      initial_state: {
        s: 898850, q: 0, l: 450, i: 350, r: 250, h: 60, u: 10, f: 5, hu: 5, a: 20,
      },
    },
    baseRates: { ...SLOW_RATES },
    windows: [],
    horizonDays: 270,
    releaseRt: 1.5,
    selectedWindowId: null,
    capacity: { ward: null, icu: null },
    comparisonIds: [],
  };
}

/** The three-phase restriction calendar used across payload and server tests:
 * four weeks of service restrictions, four weeks of 70% confinement, two more
 * weeks of restrictions. */
export function phasedDraft(): ScenarioDraft {
  const draft = emptyDraft();
  draft.windows = [
    { id: "w1", startDate: "2020-11-10", durationDays: 28, effectKind: "rt_target", effectValue: 0.8 },
    { id: "w2", startDate: "2021-01-11", durationDays: 28, effectKind: "confine_fraction", effectValue: 0.7 },
    { id: "w3", startDate: "2021-03-15", durationDays: 14, effectKind: "rt_target", effectValue: 0.8 },
  ];
  return draft;
}

export function seriesOf(name: string, startDate: string, values: number[], width = 0): SeriesExtract {
  const dates = values.map((_, k) => {
    const t = Date.parse(`${startDate}T00:00:00Z`) + k * 86_400_000;
    return new Date(t).toISOString().slice(0, 10);
  });
  return {
    name,
    dates,
    mean: [...values],
    low: values.map((v) => v - width),
    high: values.map((v) => v + width),
  };
}

export function namedResult(id: string, name: string, extract: SeriesExtract): NamedResult {
  return { id, label: name, series: { [extract.name]: extract }, extrema: [] };
}
