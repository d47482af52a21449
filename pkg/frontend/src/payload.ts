/** Draft validation and serialization into the server's scenario document.
 *
 * The client validates what the form can fix locally (field paths map onto
 * inputs); the server's schema remains the authority. Serialization writes
 * keys in a fixed order so equal drafts produce byte-identical payloads.
 */

import type {
  ScenarioDocument,
  ScenarioDraft,
  ValidationIssue,
  WindowDraft,
} from "./types.js";

export class DraftValidationError extends Error {
  issues: ValidationIssue[];

  constructor(issues: ValidationIssue[]) {
    super(issues.map((i) => `${i.field}: ${i.message}`).join("; "));
    this.issues = issues;
  }
}

const DAY_MS = 86_400_000;

export function parseDay(iso: string): number {
  const t = Date.parse(`${iso}T00:00:00Z`);
  if (Number.isNaN(t)) throw new Error(`bad date: ${iso}`);
  return Math.round(t / DAY_MS);
}

export function dayToIso(day: number): string {
  return new Date(day * DAY_MS).toISOString().slice(0, 10);
}

export function addDays(iso: string, days: number): string {
  return dayToIso(parseDay(iso) + days);
}

function isIsoDate(value: string): boolean {
  return /^\d{4}-\d{2}-\d{2}$/.test(value) && !Number.isNaN(Date.parse(`${value}T00:00:00Z`));
}

function windowIssues(w: WindowDraft, field: string): ValidationIssue[] {
  const issues: ValidationIssue[] = [];
  if (!isIsoDate(w.startDate)) {
    issues.push({ field: `${field}.startDate`, message: "not an ISO date" });
  }
  if (!Number.isInteger(w.durationDays) || w.durationDays < 1) {
    issues.push({ field: `${field}.durationDays`, message: "must be a whole number of days, at least 1" });
  }
  if (w.effectKind === "confine_fraction") {
    if (!(w.effectValue >= 0 && w.effectValue <= 1)) {
      issues.push({ field: `${field}.effectValue`, message: "confined share must lie in [0, 1]" });
    }
  } else if (!(w.effectValue >= 0)) {
    issues.push({ field: `${field}.effectValue`, message: "must be nonnegative" });
  }
  return issues;
}

export function validateDraft(draft: ScenarioDraft): ValidationIssue[] {
  const issues: ValidationIssue[] = [];
  if (!draft.name.trim()) issues.push({ field: "name", message: "scenario needs a name" });
  if (!Number.isInteger(draft.horizonDays) || draft.horizonDays < 1) {
    issues.push({ field: "horizonDays", message: "horizon must be at least one day" });
  }
  if (!(draft.releaseRt >= 0)) {
    issues.push({ field: "releaseRt", message: "release reproduction number must be nonnegative" });
  }
  for (const [key, value] of Object.entries(draft.capacity)) {
    if (value !== null && !(value > 0)) {
      issues.push({ field: `capacity.${key}`, message: "capacity must be positive" });
    }
  }
  draft.windows.forEach((w, k) => issues.push(...windowIssues(w, `windows.${k}`)));
  if (issues.length > 0) return issues;

  const startDay = parseDay(draft.population.start_date);
  const ordered = sortedWindows(draft.windows);
  for (let k = 0; k < ordered.length; k += 1) {
    const w = ordered[k]!;
    const from = parseDay(w.startDate) - startDay;
    if (from < 0 || from + w.durationDays > draft.horizonDays) {
      issues.push({ field: windowField(draft, w), message: "window falls outside the horizon" });
    }
    const next = ordered[k + 1];
    if (next && parseDay(w.startDate) + w.durationDays > parseDay(next.startDate)) {
      issues.push({ field: windowField(draft, next), message: "windows overlap" });
    }
  }
  return issues;
}

function windowField(draft: ScenarioDraft, w: WindowDraft): string {
  return `windows.${draft.windows.indexOf(w)}`;
}

function sortedWindows(windows: WindowDraft[]): WindowDraft[] {
  return [...windows].sort(
    (a, b) => parseDay(a.startDate) - parseDay(b.startDate) || a.id.localeCompare(b.id),
  );
}

/** Build the server document; throws DraftValidationError when invalid. */
export function buildScenarioPayload(draft: ScenarioDraft): ScenarioDocument {
  const issues = validateDraft(draft);
  if (issues.length > 0) throw new DraftValidationError(issues);
  return {
    name: draft.name,
    population: {
      p_total: draft.population.p_total,
      start_date: draft.population.start_date,
      initial_state: { ...draft.population.initial_state },
    },
    base_rates: { ...draft.baseRates },
    windows: sortedWindows(draft.windows).map((w) => ({
      start_date: w.startDate,
      duration_days: w.durationDays,
      effect: { kind: w.effectKind, value: w.effectValue },
    })),
    horizon_days: draft.horizonDays,
    release_rt: draft.releaseRt,
  };
}

/** Canonical JSON with sorted keys, so equal payloads are byte-equal. */
export function serializePayload(doc: unknown): string {
  return JSON.stringify(sortKeys(doc));
}

function sortKeys(value: unknown): unknown {
  if (Array.isArray(value)) return value.map(sortKeys);
  if (value !== null && typeof value === "object") {
    const out: Record<string, unknown> = {};
    for (const key of Object.keys(value as object).sort()) {
      out[key] = sortKeys((value as Record<string, unknown>)[key]);
    }
    return out;
  }
  return value;
}
