import { describe, expect, it } from "vitest";

import { bandPath, extent, linearScale, linePath, niceTicks } from "../src/chart.js";

describe("linearScale", () => {
  it("maps the domain linearly onto the range", () => {
    const scale = linearScale([0, 10], [0, 100]);
    expect(scale(0)).toBe(0);
    expect(scale(5)).toBe(50);
    expect(scale(10)).toBe(100);
  });

  it("handles inverted ranges (screen y)", () => {
    const y = linearScale([0, 100], [200, 0]);
    expect(y(0)).toBe(200);
    expect(y(100)).toBe(0);
  });

  it("survives a degenerate domain", () => {
    const scale = linearScale([5, 5], [0, 10]);
    expect(Number.isFinite(scale(5))).toBe(true);
  });
});

describe("paths", () => {
  const x = linearScale([0, 3], [0, 300]);
  const y = linearScale([0, 10], [100, 0]);

  it("draws a polyline through defined points", () => {
    expect(linePath([0, 5, 10], x, y)).toBe("M0,100L100,50L200,0");
  });

  it("breaks the line at gaps", () => {
    const path = linePath([0, null, 10, 5], x, y);
    expect(path).toBe("M0,100M200,0L300,50");
  });

  it("closes band polygons", () => {
    const path = bandPath([0, 0], [10, 10], x, y);
    expect(path.startsWith("M")).toBe(true);
    expect(path.endsWith("Z")).toBe(true);
    expect(path).toContain("L");
  });
});

describe("niceTicks", () => {
  it("produces round steps covering the domain", () => {
    const ticks = niceTicks(0, 100, 5);
    expect(ticks[0]).toBe(0);
    expect(ticks[ticks.length - 1]).toBe(100);
    expect(ticks.length).toBeLessThanOrEqual(6);
  });

  it("handles tiny domains", () => {
    expect(niceTicks(3, 3)).toEqual([3]);
  });
});

describe("extent", () => {
  it("spans all defined values and anchors at zero", () => {
    expect(extent([[1, 2], [null, 8]])).toEqual([0, 8]);
  });

  it("falls back on empty input", () => {
    expect(extent([[null], []])).toEqual([0, 1]);
  });
});
