import { describe, expect, it } from "vitest";
import { DEFAULT_STATE, ViewState, fromQuery, toQuery } from "../src/state.js";

describe("view state <-> URL", () => {
  it("defaults survive an empty query", () => {
    expect(fromQuery("")).toEqual(DEFAULT_STATE);
    expect(toQuery(DEFAULT_STATE)).toBe("");
  });

  it("round-trips a fully populated state", () => {
    const state: ViewState = {
      experiment: "first-run",
      side: "customer",
      alpha: 0.855,
      penalties: { V2: 1000, V3: 2000, V4: 5000 },
      cap: 80,
      compare: ["V1", "V4"],
    };
    expect(fromQuery(toQuery(state))).toEqual(state);
  });

  it("round-trip is idempotent on the serialized form", () => {
    const q = toQuery({
      ...DEFAULT_STATE,
      experiment: "x",
      alpha: 0.25,
      penalties: { V2: 1 },
    });
    expect(toQuery(fromQuery(q))).toBe(q);
  });

  it("rejects out-of-range alpha and negative penalties", () => {
    expect(fromQuery("alpha=7").alpha).toBe(DEFAULT_STATE.alpha);
    expect(fromQuery("pen=V2:-5").penalties).toEqual({});
  });
});
