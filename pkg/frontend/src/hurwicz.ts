/** The one client-side computation: the live optimism readout, recomputed
 * from the served (worst, best) pair.  Everything else renders payload
 * numbers untouched. */

import type { AlphaInterval, RiskDiagramPayload } from "./types.js";

export function hurwiczValue(worst: number, best: number, alpha: number): number {
  return (1 - alpha) * worst + alpha * best;
}

/** Recommended strategy at alpha; an exact breakpoint belongs to the
 * interval on its left (matching the service's convention). */
export function recommendedAt(intervals: AlphaInterval[], alpha: number): string {
  for (const iv of intervals) {
    if (alpha <= iv.hi) return iv.recommended;
  }
  const last = intervals[intervals.length - 1];
  if (!last) throw new Error("empty envelope");
  return last.recommended;
}

export function readout(
  diagram: RiskDiagramPayload,
  alpha: number,
): { recommended: string; values: Record<string, number> } {
  const values: Record<string, number> = {};
  for (const s of diagram.strategies) {
    values[s.strategy] = hurwiczValue(s.worst, s.best, alpha);
  }
  return { recommended: recommendedAt(diagram.intervals, alpha), values };
}
