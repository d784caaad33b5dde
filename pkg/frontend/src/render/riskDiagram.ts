/** Risk diagram renderer: per-strategy optimism lines, the best-response
 * envelope, breakpoint markers, criterion badges, and the live slider
 * marker.  Pure string -> SVG so it can be tested without a DOM. */

import { alphaLabel, grouped } from "../format.js";
import { readout } from "../hurwicz.js";
import type { RiskDiagramPayload } from "../types.js";

const COLORS = ["#2563eb", "#dc2626", "#059669", "#d97706", "#7c3aed", "#0891b2"];

export interface DiagramGeometry {
  width: number;
  height: number;
  margin: number;
}

const DEFAULT_GEOMETRY: DiagramGeometry = { width: 560, height: 300, margin: 42 };

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

export function renderSkeleton(message = "risk payload not loaded"): string {
  return (
    `<div class="diagram-skeleton" data-state="empty">` +
    `<p>${esc(message)}</p><button class="retry" data-action="retry">retry</button></div>`
  );
}

export function renderRiskDiagram(
  payload: RiskDiagramPayload | null,
  alpha: number,
  geometry: DiagramGeometry = DEFAULT_GEOMETRY,
): string {
  if (!payload || payload.strategies.length === 0) return renderSkeleton();
  const { width, height, margin } = geometry;
  const innerW = width - 2 * margin;
  const innerH = height - 2 * margin;
  const values = payload.strategies.flatMap((s) => [s.worst, s.best]);
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const span = hi - lo || 1;
  const x = (a: number) => margin + a * innerW;
  const y = (v: number) => margin + (1 - (v - lo) / span) * innerH;

  const parts: string[] = [];
  parts.push(
    `<svg class="risk-diagram" viewBox="0 0 ${width} ${height}" role="img" ` +
      `data-orientation="${payload.orientation}">`,
  );
  // axes
  parts.push(
    `<line class="axis" x1="${margin}" y1="${height - margin}" x2="${width - margin}" y2="${height - margin}"/>`,
    `<line class="axis" x1="${margin}" y1="${margin}" x2="${margin}" y2="${height - margin}"/>`,
    `<text class="axis-label" x="${width - margin}" y="${height - 8}">optimism</text>`,
  );

  // strategy lines: worst at alpha 0 to best at alpha 1
  payload.strategies.forEach((s, i) => {
    const color = COLORS[i % COLORS.length];
    parts.push(
      `<line class="strategy-line" data-strategy="${esc(s.strategy)}" ` +
        `x1="${x(0)}" y1="${y(s.worst)}" x2="${x(1)}" y2="${y(s.best)}" ` +
        `stroke="${color}"/>`,
      `<text class="strategy-label" data-strategy="${esc(s.strategy)}" ` +
        `x="${x(1) + 4}" y="${y(s.best)}" fill="${color}">${esc(s.strategy)}</text>`,
    );
  });

  // envelope segments along the recommended strategy of each interval
  const statFor = new Map(payload.strategies.map((s) => [s.strategy, s]));
  for (const iv of payload.intervals) {
    const stat = statFor.get(iv.recommended);
    if (!stat) continue;
    const v = (a: number) => (1 - a) * stat.worst + a * stat.best;
    parts.push(
      `<line class="envelope" data-strategy="${esc(iv.recommended)}" ` +
        `data-lo="${iv.lo}" data-hi="${iv.hi}" ` +
        `x1="${x(iv.lo)}" y1="${y(v(iv.lo))}" x2="${x(iv.hi)}" y2="${y(v(iv.hi))}"/>`,
    );
  }

  // breakpoint markers with alpha labels
  for (const bp of payload.breakpoints) {
    parts.push(
      `<line class="breakpoint-rule" x1="${x(bp.alpha)}" y1="${margin}" ` +
        `x2="${x(bp.alpha)}" y2="${height - margin}"/>`,
      `<circle class="breakpoint" data-alpha="${bp.alpha}"` +
        (bp.exact ? ` data-exact="${esc(bp.exact)}"` : "") +
        ` cx="${x(bp.alpha)}" cy="${height - margin}" r="4"/>`,
      `<text class="breakpoint-label" x="${x(bp.alpha)}" y="${margin - 6}">` +
        `α=${alphaLabel(bp.alpha)}</text>`,
    );
  }

  // criterion badges pinned to their winners
  let badgeRow = 0;
  for (const [name, criterion] of Object.entries(payload.criteria)) {
    const stat = statFor.get(criterion.winner);
    if (!stat) continue;
    parts.push(
      `<text class="criterion-badge" data-criterion="${esc(name)}" ` +
        `data-winner="${esc(criterion.winner)}" x="${margin + 6}" ` +
        `y="${margin + 14 + 14 * badgeRow}">${esc(name)}: ${esc(criterion.winners.join(", "))}</text>`,
    );
    badgeRow += 1;
  }

  // slider marker and live readout
  const live = readout(payload, alpha);
  const best = live.values[live.recommended];
  parts.push(
    `<line class="slider" data-alpha="${alpha}" x1="${x(alpha)}" y1="${margin}" ` +
      `x2="${x(alpha)}" y2="${height - margin}"/>`,
    `<text class="slider-readout" data-recommended="${esc(live.recommended)}" ` +
      `x="${x(alpha) + 4}" y="${margin + innerH / 2}">` +
      `${esc(live.recommended)} @ α=${alphaLabel(alpha)}` +
      (best === undefined ? "" : ` (${grouped(best)})`) +
      `</text>`,
  );
  parts.push("</svg>");
  return parts.join("\n");
}
