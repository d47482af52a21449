/** Shared shapes for the planner UI. Server documents use snake_case keys. */

export type EffectKind = "rt_target" | "beta_multiplier" | "confine_fraction";

export interface WindowDraft {
  id: string;
  startDate: string; // ISO date
  durationDays: number;
  effectKind: EffectKind;
  effectValue: number;
}

export interface PopulationDoc {
  p_total: number;
  start_date: string;
  initial_state: Record<string, number>;
}

export type RatesDoc = Record<string, number>;

/** Editable mirror of a scenario plus view state. */
export interface ScenarioDraft {
  name: string;
  population: PopulationDoc;
  baseRates: RatesDoc;
  windows: WindowDraft[];
  horizonDays: number;
  releaseRt: number;
  selectedWindowId: string | null;
  capacity: { ward: number | null; icu: number | null };
  comparisonIds: string[];
}

export interface WindowDocument {
  start_date: string;
  duration_days: number;
  effect: { kind: EffectKind; value: number };
}

export interface ScenarioDocument {
  name: string;
  population: PopulationDoc;
  base_rates: RatesDoc;
  windows: WindowDocument[];
  horizon_days: number;
  release_rt: number;
}

export type JobState = "queued" | "running" | "done" | "failed";

export interface Job {
  id: string;
  kind: string;
  state: JobState;
  submitted_at: string;
  finished_at: string | null;
  result_ref: string | null;
  error: string | null;
}

export interface SeriesExtract {
  name: string;
  dates: string[];
  mean: number[];
  low: number[];
  high: number[];
}

export interface ExtremaMarker {
  date: string;
  series: string;
  kind: "peak" | "valley";
  mean: number;
  ciLow: number;
  ciHigh: number;
}

/** A fetched scenario result, immutable once loaded. */
export interface NamedResult {
  id: string;
  label: string;
  series: Record<string, SeriesExtract>;
  extrema: ExtremaMarker[];
}

export interface BreachInterval {
  startDate: string;
  endDate: string; // inclusive
}

export interface ChartSeries {
  scenarioId: string;
  label: string;
  color: string;
  seriesName: string;
  dates: string[];
  mean: (number | null)[];
  low: (number | null)[];
  high: (number | null)[];
  markers: ExtremaMarker[];
  breaches: BreachInterval[];
}

export interface ValidationIssue {
  field: string;
  message: string;
}
