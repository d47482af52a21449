/** DOM wiring for the planner: timeline editing on an SVG strip, scenario
 * submission, job polling with a running shimmer, and band charts with
 * capacity thresholds and extrema markers. All epidemic numbers come from
 * server artifacts; this file only draws them. */

import { ApiClient, LatestOnly, RequestFailed } from "./api.js";
import { bandPath, extent, linearScale, linePath, niceTicks } from "./chart.js";
import { mergeComparison } from "./compare.js";
import { DraftValidationError, addDays, buildScenarioPayload, parseDay } from "./payload.js";
import {
  UndoHistory,
  dragCreateWindow,
  freshWindowId,
  removeWindow,
  setEffect,
  snapToDay,
} from "./timeline.js";
import type { EffectKind, NamedResult, ScenarioDraft } from "./types.js";

const api = new ApiClient("");
const fresh = new LatestOnly();

const DEFAULT_DRAFT: ScenarioDraft = {
  name: "plan A",
  population: {
    p_total: 900000,
    start_date: "2020-09-01",
    initial_state: {
      s: 898850, q: 0, l: 450, i: 350, r: 250, h: 60, u: 10, f: 5, hu: 5, a: 20,
    },
  },
  baseRates: {
    beta: 0.3, s_q: 0, q_s: 0, i_l: 0.2, i_r: 0.17, i_h: 0.024, i_u: 0.006,
    h_u: 0.05, h_f: 0.015, h_a: 0.12, u_f: 0.04, u_hu: 0.08, hu_a: 0.1,
  },
  windows: [],
  horizonDays: 270,
  releaseRt: 1.5,
  selectedWindowId: null,
  capacity: { ward: null, icu: null },
  comparisonIds: [],
};

const history = new UndoHistory(DEFAULT_DRAFT);
const results = new Map<string, NamedResult>();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function draft(): ScenarioDraft {
  return history.current();
}

function apply(next: ScenarioDraft): void {
  history.apply(next);
  renderTimeline();
  renderWindowList();
}

// -- timeline -----------------------------------------------------------------

const TIMELINE_W = 900;
const TIMELINE_H = 64;

function renderTimeline(): void {
  const svg = el<HTMLElement>("timeline");
  const d = draft();
  const start = d.population.start_date;
  const axisDays = d.horizonDays;
  const x = (iso: string) =>
    ((parseDay(iso) - parseDay(start)) / axisDays) * TIMELINE_W;
  const blocks = d.windows
    .map((w) => {
      const left = x(w.startDate);
      const width = (w.durationDays / axisDays) * TIMELINE_W;
      const selected = w.id === d.selectedWindowId ? " selected" : "";
      return `<g class="window${selected}" data-id="${w.id}">
        <rect x="${left.toFixed(1)}" y="8" width="${width.toFixed(1)}" height="${TIMELINE_H - 16}" rx="4"></rect>
        <text x="${(left + 4).toFixed(1)}" y="${TIMELINE_H / 2 + 4}">${w.effectKind.replace("_", " ")} ${w.effectValue}</text>
      </g>`;
    })
    .join("");
  const months: string[] = [];
  for (let day = 0; day <= axisDays; day += 1) {
    const iso = addDays(start, day);
    if (iso.endsWith("-01")) {
      months.push(
        `<line x1="${x(iso).toFixed(1)}" y1="0" x2="${x(iso).toFixed(1)}" y2="${TIMELINE_H}"></line>` +
          `<text x="${(x(iso) + 3).toFixed(1)}" y="12">${iso.slice(0, 7)}</text>`,
      );
    }
  }
  svg.innerHTML = `<g class="months">${months.join("")}</g>${blocks}`;
}

function timelineFraction(event: MouseEvent): number {
  const svg = el<HTMLElement>("timeline");
  const rect = svg.getBoundingClientRect();
  return (event.clientX - rect.left) / rect.width;
}

let dragStart: string | null = null;

function wireTimeline(): void {
  const svg = el<HTMLElement>("timeline");
  svg.addEventListener("mousedown", (event) => {
    const d = draft();
    dragStart = snapToDay(d.population.start_date, d.horizonDays, timelineFraction(event));
  });
  svg.addEventListener("mouseup", (event) => {
    if (dragStart === null) return;
    const d = draft();
    const end = snapToDay(d.population.start_date, d.horizonDays, timelineFraction(event));
    const kind = el<HTMLSelectElement>("effect-kind").value as EffectKind;
    const value = Number(el<HTMLInputElement>("effect-value").value);
    apply(dragCreateWindow(d, dragStart, end, kind, value, freshWindowId()));
    dragStart = null;
  });
  svg.addEventListener("click", (event) => {
    const target = (event.target as Element).closest(".window");
    if (target) {
      apply({ ...draft(), selectedWindowId: target.getAttribute("data-id") });
    }
  });
}

function renderWindowList(): void {
  const list = el<HTMLElement>("window-list");
  const d = draft();
  list.innerHTML = d.windows
    .map(
      (w) => `<li data-id="${w.id}" class="${w.id === d.selectedWindowId ? "selected" : ""}">
        ${w.startDate} +${w.durationDays}d ${w.effectKind}=${w.effectValue}
        <button data-remove="${w.id}">x</button></li>`,
    )
    .join("");
  list.querySelectorAll("button[data-remove]").forEach((button) => {
    button.addEventListener("click", () => {
      apply(removeWindow(draft(), button.getAttribute("data-remove")!));
    });
  });
}

// -- runs and charts ------------------------------------------------------------

function setStatus(text: string, shimmer = false): void {
  const node = el<HTMLElement>("status");
  node.textContent = text;
  node.classList.toggle("shimmer", shimmer);
}

async function runScenario(): Promise<void> {
  const tag = fresh.next();
  const d = draft();
  let payload;
  try {
    payload = buildScenarioPayload(d);
  } catch (error) {
    if (error instanceof DraftValidationError) {
      setStatus(error.issues.map((i) => `${i.field}: ${i.message}`).join(" | "));
      return;
    }
    throw error;
  }
  const ensembleRef = el<HTMLSelectElement>("ensemble").value;
  if (!ensembleRef) {
    setStatus("no ensemble selected; calibrate first or upload one");
    return;
  }
  setStatus("submitting...", true);
  try {
    const job = await api.submitScenario(payload, ensembleRef);
    setStatus(`job ${job.id} running...`, true);
    const done = await api.pollJob(job.id);
    if (!fresh.isCurrent(tag)) return; // a newer draft superseded this run
    if (done.state === "failed") {
      setStatus(`job failed: ${done.error}`);
      return;
    }
    const [series, extrema] = await Promise.all([
      api.fetchBands(job.id),
      api.fetchExtrema(job.id),
    ]);
    if (!fresh.isCurrent(tag)) return;
    results.set(job.id, { id: job.id, label: d.name, series, extrema });
    apply({ ...draft(), comparisonIds: [...draft().comparisonIds, job.id].slice(-4) });
    setStatus(`done: ${d.name} (${job.id.slice(0, 8)})`);
    renderCharts();
  } catch (error) {
    if (error instanceof RequestFailed) {
      const where = error.body.field_path ? ` at ${error.body.field_path}` : "";
      setStatus(`rejected${where}: ${error.body.message}`);
    } else {
      setStatus(String(error));
    }
  }
}

const CHART_W = 900;
const CHART_H = 240;
const PAD = 36;

function renderChart(containerId: string, seriesName: string, threshold: number | null): void {
  const container = el<HTMLElement>(containerId);
  const chosen = [...results.values()].filter((r) => draft().comparisonIds.includes(r.id));
  if (chosen.length === 0) {
    container.innerHTML = "";
    return;
  }
  const overlays = mergeComparison(chosen, seriesName, threshold);
  const [lo, hi] = extent(overlays.flatMap((o) => [o.high, o.mean]));
  const yTop = threshold !== null ? Math.max(hi, threshold) : hi;
  const x = linearScale([0, Math.max(...overlays.map((o) => o.dates.length - 1), 1)], [PAD, CHART_W - 8]);
  const y = linearScale([lo, yTop], [CHART_H - 20, 10]);
  const parts: string[] = [];
  for (const tick of niceTicks(lo, yTop)) {
    parts.push(
      `<line class="grid" x1="${PAD}" y1="${y(tick)}" x2="${CHART_W - 8}" y2="${y(tick)}"></line>` +
        `<text class="tick" x="2" y="${y(tick) + 4}">${tick}</text>`,
    );
  }
  for (const overlay of overlays) {
    parts.push(`<path class="band" fill="${overlay.color}" d="${bandPath(overlay.low, overlay.high, x, y)}"></path>`);
    parts.push(`<path class="line" stroke="${overlay.color}" d="${linePath(overlay.mean, x, y)}"></path>`);
    const index = new Map(overlay.dates.map((d, k) => [d, k]));
    for (const marker of overlay.markers) {
      const k = index.get(marker.date);
      if (k === undefined) continue;
      parts.push(
        `<circle class="marker ${marker.kind}" fill="${overlay.color}" cx="${x(k)}" cy="${y(marker.mean)}" r="4">` +
          `<title>${marker.kind} ${marker.date}: ${Math.round(marker.mean)}</title></circle>`,
      );
    }
    for (const breach of overlay.breaches) {
      const from = index.get(breach.startDate);
      const to = index.get(breach.endDate);
      if (from === undefined || to === undefined) continue;
      parts.push(
        `<rect class="breach" fill="${overlay.color}" x="${x(from)}" y="0" width="${Math.max(x(to) - x(from), 2)}" height="${CHART_H}"></rect>`,
      );
    }
  }
  if (threshold !== null) {
    parts.push(`<line class="capacity" x1="${PAD}" y1="${y(threshold)}" x2="${CHART_W - 8}" y2="${y(threshold)}"></line>`);
  }
  container.innerHTML = parts.join("");
}

function renderCharts(): void {
  const ward = el<HTMLInputElement>("capacity-ward").value;
  const icu = el<HTMLInputElement>("capacity-icu").value;
  renderChart("chart-i", "I", null);
  renderChart("chart-h", "h_census", ward ? Number(ward) : null);
  renderChart("chart-u", "U", icu ? Number(icu) : null);
}

async function refreshEnsembles(): Promise<void> {
  const select = el<HTMLSelectElement>("ensemble");
  const listing = await api.listEnsembles();
  select.innerHTML = listing.ensembles
    .map((e) => `<option value="${e.ref}">${e.name} (${e.members})</option>`)
    .join("");
}

function wireControls(): void {
  el<HTMLButtonElement>("run").addEventListener("click", () => void runScenario());
  el<HTMLButtonElement>("undo").addEventListener("click", () => {
    history.undo();
    renderTimeline();
    renderWindowList();
  });
  el<HTMLButtonElement>("redo").addEventListener("click", () => {
    history.redo();
    renderTimeline();
    renderWindowList();
  });
  el<HTMLButtonElement>("refresh-ensembles").addEventListener("click", () => void refreshEnsembles());
  for (const id of ["capacity-ward", "capacity-icu"]) {
    el<HTMLInputElement>(id).addEventListener("change", renderCharts);
  }
  el<HTMLInputElement>("scenario-name").addEventListener("change", (event) => {
    apply({ ...draft(), name: (event.target as HTMLInputElement).value });
  });
  el<HTMLInputElement>("horizon").addEventListener("change", (event) => {
    apply({ ...draft(), horizonDays: Number((event.target as HTMLInputElement).value) });
  });
  el<HTMLInputElement>("release-rt").addEventListener("change", (event) => {
    apply({ ...draft(), releaseRt: Number((event.target as HTMLInputElement).value) });
  });
}

export function start(): void {
  wireTimeline();
  wireControls();
  renderTimeline();
  renderWindowList();
  void refreshEnsembles();
  setStatus("ready");
}

if (typeof document !== "undefined" && document.getElementById("timeline")) {
  start();
}
