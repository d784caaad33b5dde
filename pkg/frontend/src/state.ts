/** View state, fully reconstructible from the URL query string. */

export type Side = "supplier" | "customer" | "both";

export interface ViewState {
  experiment: string | null;
  side: Side;
  alpha: number;
  penalties: Record<string, number>;
  cap: number | null;
  compare: string[]; // strategies highlighted for comparison
}

export const DEFAULT_STATE: ViewState = {
  experiment: null,
  side: "both",
  alpha: 0.8,
  penalties: {},
  cap: null,
  compare: [],
};

export function toQuery(state: ViewState): string {
  const q = new URLSearchParams();
  if (state.experiment) q.set("exp", state.experiment);
  if (state.side !== DEFAULT_STATE.side) q.set("side", state.side);
  if (state.alpha !== DEFAULT_STATE.alpha) q.set("alpha", String(state.alpha));
  const penKeys = Object.keys(state.penalties).sort();
  if (penKeys.length) {
    q.set("pen", penKeys.map((k) => `${k}:${state.penalties[k]}`).join(","));
  }
  if (state.cap !== null) q.set("cap", String(state.cap));
  if (state.compare.length) q.set("cmp", state.compare.join(","));
  return q.toString();
}

export function fromQuery(query: string): ViewState {
  const q = new URLSearchParams(query);
  const state: ViewState = {
    ...DEFAULT_STATE,
    penalties: {},
    compare: [],
  };
  const exp = q.get("exp");
  if (exp) state.experiment = exp;
  const side = q.get("side");
  if (side === "supplier" || side === "customer" || side === "both") state.side = side;
  const alpha = q.get("alpha");
  if (alpha !== null) {
    const v = Number(alpha);
    if (Number.isFinite(v) && v >= 0 && v <= 1) state.alpha = v;
  }
  const pen = q.get("pen");
  if (pen) {
    for (const part of pen.split(",")) {
      const [k, v] = part.split(":");
      const value = Number(v);
      if (k && Number.isFinite(value) && value >= 0) state.penalties[k] = value;
    }
  }
  const cap = q.get("cap");
  if (cap !== null && Number.isFinite(Number(cap))) state.cap = Number(cap);
  const cmp = q.get("cmp");
  if (cmp) state.compare = cmp.split(",").filter(Boolean);
  return state;
}
