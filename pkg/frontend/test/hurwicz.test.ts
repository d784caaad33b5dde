import { describe, expect, it } from "vitest";
import { hurwiczValue, readout, recommendedAt } from "../src/hurwicz.js";
import type { RiskDiagramPayload, RiskPayload } from "../src/types.js";
import { fixture } from "./helpers.js";

const supplier = fixture<RiskPayload>("risk_supplier_t4.json").diagram;

describe("hurwiczValue", () => {
  it("interpolates between worst and best", () => {
    expect(hurwiczValue(100, 200, 0)).toBe(100);
    expect(hurwiczValue(100, 200, 1)).toBe(200);
    expect(hurwiczValue(100, 200, 0.25)).toBeCloseTo(125, 12);
  });

  it("matches the served stats at the endpoints", () => {
    const s1 = supplier.strategies.find((s) => s.strategy === "S1")!;
    expect(hurwiczValue(s1.worst, s1.best, 0)).toBe(235470);
    expect(hurwiczValue(s1.worst, s1.best, 1)).toBe(478610);
  });
});

describe("recommendedAt", () => {
  it("respects the left-interval rule at exact breakpoints", () => {
    const bp = supplier.breakpoints[0]!.alpha;
    expect(recommendedAt(supplier.intervals, bp)).toBe("S2");
    expect(recommendedAt(supplier.intervals, bp + 1e-9)).toBe("S1");
    expect(recommendedAt(supplier.intervals, 0)).toBe("S2");
    expect(recommendedAt(supplier.intervals, 1)).toBe("S1");
  });

  it("throws on an empty envelope", () => {
    expect(() => recommendedAt([], 0.5)).toThrow();
  });
});

describe("readout", () => {
  it("produces one live value per strategy", () => {
    const live = readout(supplier as RiskDiagramPayload, 0.5);
    expect(Object.keys(live.values).sort()).toEqual(["S1", "S2"]);
    expect(live.values["S1"]).toBeCloseTo((235470 + 478610) / 2, 6);
  });
});
