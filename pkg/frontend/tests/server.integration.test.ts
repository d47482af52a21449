/** End-to-end against the real engine: the three-phase restriction draft must
 * pass server validation untouched, and the finished run must show one
 * extrema-marker cluster per window epoch. Spawns `epiward serve` from the
 * repository's Python environment. */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { markersPerEpoch, mergeComparison } from "../src/compare.js";
import { buildScenarioPayload } from "../src/payload.js";
import { SLOW_RATES, phasedDraft } from "./fixtures.js";

const PORT = 8917;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
const api = new ApiClient(BASE, fetch, 150, 1.4, 2_000);

async function waitForServer(timeoutMs = 60_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    try {
      await api.healthz();
      return;
    } catch {
      if (Date.now() > deadline) throw new Error("server did not come up");
      await new Promise((resolve) => setTimeout(resolve, 250));
    }
  }
}

beforeAll(async () => {
  const dataDir = mkdtempSync(join(tmpdir(), "epiward-ui-"));
  server = spawn(
    "python3",
    ["-m", "epiward.cli", "serve", "--data-dir", dataDir, "--port", String(PORT)],
    { stdio: "ignore" },
  );
  await waitForServer();
}, 90_000);

afterAll(() => {
  server?.kill();
});

describe("planner against the live engine", () => {
  it(
    "three-phase draft passes server validation and clusters extrema per window epoch",
    async () => {
      const members = [0.95, 1.0, 1.05].map((f) => ({ ...SLOW_RATES, beta: SLOW_RATES["beta"]! * f }));
      const { ref } = await api.uploadEnsemble(members, "ui-fixture");

      const draft = phasedDraft();
      const payload = buildScenarioPayload(draft);
      const job = await api.submitScenario(payload, ref); // 202 = zero validation errors
      expect(job.kind).toBe("scenario");

      const done = await api.pollJob(job.id, 120_000);
      expect(done.state).toBe("done");

      const extrema = await api.fetchExtrema(job.id);
      const infections = extrema.filter((m) => m.series === "I");
      const clusters = markersPerEpoch(
        infections,
        draft.windows.map((w) => w.startDate),
      );
      expect(clusters).toHaveLength(3);
      for (const count of clusters) expect(count).toBeGreaterThan(0);

      // the fetched bands feed the chart pipeline without further math
      const series = await api.fetchBands(job.id);
      const result = { id: job.id, label: draft.name, series, extrema };
      const [overlay] = mergeComparison([result], "I", null);
      expect(overlay!.dates.length).toBe(draft.horizonDays + 1);
      expect(overlay!.markers.length).toBe(infections.length);
    },
    180_000,
  );

  it("rejects a draft the local validator would reject, naming the field", async () => {
    const draft = phasedDraft();
    const payload = buildScenarioPayload(draft);
    const broken = { ...payload, horizon_days: undefined } as unknown as typeof payload;
    delete (broken as Record<string, unknown>)["horizon_days"];
    await expect(api.submitScenario(broken, "ensembles/nope.json")).rejects.toMatchObject({
      status: 400,
      body: { code: "schema_invalid", field_path: "horizon_days" },
    });
  });
});
