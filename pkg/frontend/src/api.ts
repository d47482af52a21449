/** HTTP client for the planning engine's job API.
 *
 * Polling runs at a 1 s cadence with exponential backoff; concurrent polls of
 * the same job share one in-flight request, and a monotonically increasing
 * sequence number discards responses that arrive after the view has moved on
 * to a newer draft.
 */

import { parseBandsCsv, parseExtrema } from "./bands.js";
import type { ExtremaMarker, Job, RatesDoc, ScenarioDocument, SeriesExtract } from "./types.js";

export interface ApiError {
  code: string;
  message: string;
  field_path?: string;
}

export class RequestFailed extends Error {
  constructor(public status: number, public body: ApiError) {
    super(`${body.code}: ${body.message}`);
  }
}

type FetchLike = typeof fetch;

const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

export class ApiClient {
  private inflightPolls = new Map<string, Promise<Job>>();

  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = fetch,
    private pollIntervalMs = 1000,
    private pollBackoff = 1.5,
    private pollMaxIntervalMs = 10_000,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let body: ApiError;
      try {
        body = (await response.json()) as ApiError;
      } catch {
        body = { code: "http_error", message: response.statusText };
      }
      throw new RequestFailed(response.status, body);
    }
    return (await response.json()) as T;
  }

  healthz(): Promise<{ status: string }> {
    return this.request("/healthz");
  }

  submitScenario(scenario: ScenarioDocument, ensembleRef: string): Promise<Job> {
    return this.request("/api/v1/scenarios/run", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ scenario, ensemble: ensembleRef }),
    });
  }

  getJob(id: string): Promise<Job> {
    const existing = this.inflightPolls.get(id);
    if (existing) return existing;
    const pending = this.request<Job>(`/api/v1/jobs/${id}`).finally(() => {
      this.inflightPolls.delete(id);
    });
    this.inflightPolls.set(id, pending);
    return pending;
  }

  /** Resolve once the job reaches done or failed. */
  async pollJob(id: string, timeoutMs = 300_000): Promise<Job> {
    const deadline = Date.now() + timeoutMs;
    let interval = this.pollIntervalMs;
    for (;;) {
      const job = await this.getJob(id);
      if (job.state === "done" || job.state === "failed") return job;
      if (Date.now() > deadline) throw new Error(`job ${id} still ${job.state} after ${timeoutMs}ms`);
      await sleep(interval);
      interval = Math.min(interval * this.pollBackoff, this.pollMaxIntervalMs);
    }
  }

  async fetchBands(id: string): Promise<Record<string, SeriesExtract>> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/v1/jobs/${id}/bands`);
    if (!response.ok) throw new RequestFailed(response.status, (await response.json()) as ApiError);
    return parseBandsCsv(await response.text());
  }

  async fetchExtrema(id: string): Promise<ExtremaMarker[]> {
    return parseExtrema(
      await this.request<{ entries: never[] }>(`/api/v1/jobs/${id}/extrema`),
    );
  }

  listEnsembles(): Promise<{ ensembles: { ref: string; name: string; members: number }[] }> {
    return this.request("/api/v1/ensembles");
  }

  uploadEnsemble(members: RatesDoc[], name = ""): Promise<{ ref: string; members: number }> {
    return this.request("/api/v1/ensembles", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ name, members }),
    });
  }
}

/** Keeps only the newest request relevant: callers tag work with next(), and
 * check isCurrent(tag) before applying a response that raced with newer input. */
export class LatestOnly {
  private seq = 0;

  next(): number {
    this.seq += 1;
    return this.seq;
  }

  isCurrent(tag: number): boolean {
    return tag === this.seq;
  }
}
