/** Cost-breakdown bars and backorder-series lines (SVG strings). */

import { grouped } from "../format.js";
import type { ResultRow } from "../types.js";

const COST_SEGMENTS: [keyof ResultRow, string][] = [
  ["production_cost", "#2563eb"],
  ["inventory_cost", "#059669"],
  ["backorder_cost", "#dc2626"],
  ["purchasing_cost", "#d97706"],
];

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

function scenarioId(row: ResultRow): string {
  return `${row.trend}-${row.consolidation}-${row.visibility}-${row.strategy}`;
}

export function renderCostBreakdown(rows: ResultRow[], width = 720, barHeight = 16): string {
  if (!rows.length) return `<div class="chart-skeleton" data-state="empty">no results</div>`;
  const gap = 6;
  const labelW = 150;
  const maxCost = Math.max(...rows.map((r) => r.global_costs)) || 1;
  const height = rows.length * (barHeight + gap) + gap;
  const parts = [
    `<svg class="cost-breakdown" viewBox="0 0 ${width} ${height}" role="img">`,
  ];
  rows.forEach((row, i) => {
    const yTop = gap + i * (barHeight + gap);
    let xCursor = labelW;
    parts.push(
      `<text class="bar-label" x="${labelW - 6}" y="${yTop + barHeight - 4}" ` +
        `text-anchor="end">${esc(scenarioId(row))}</text>`,
    );
    for (const [key, color] of COST_SEGMENTS) {
      const value = row[key] as number;
      const w = ((width - labelW - 60) * value) / maxCost;
      parts.push(
        `<rect class="cost-segment" data-kind="${key}" data-value="${value}" ` +
          `data-scenario="${esc(scenarioId(row))}" x="${xCursor}" y="${yTop}" ` +
          `width="${w}" height="${barHeight}" fill="${color}"/>`,
      );
      xCursor += w;
    }
    parts.push(
      `<text class="bar-total" x="${xCursor + 4}" y="${yTop + barHeight - 4}">` +
        `${grouped(row.global_costs)}</text>`,
    );
  });
  parts.push("</svg>");
  return parts.join("\n");
}

export type Series = { label: string; points: [number, number][] };

/** Per-period backorder levels parsed from a trace log. */
export function backorderSeriesFromTrace(traceJsonl: string, label: string): Series {
  const points: [number, number][] = [];
  for (const line of traceJsonl.split("\n")) {
    if (!line.trim()) continue;
    const record = JSON.parse(line) as { event?: string; period?: number; backlog?: number };
    if (record.event === "execute" && record.period !== undefined) {
      points.push([record.period, record.backlog ?? 0]);
    }
  }
  points.sort((a, b) => a[0] - b[0]);
  return { label, points };
}

export function renderBackorderSeries(series: Series[], width = 560, height = 220): string {
  const present = series.filter((s) => s.points.length);
  if (!present.length) {
    return `<div class="chart-skeleton" data-state="empty">no backorder series</div>`;
  }
  const margin = 34;
  const maxT = Math.max(...present.flatMap((s) => s.points.map((p) => p[0])));
  const minT = Math.min(...present.flatMap((s) => s.points.map((p) => p[0])));
  const maxV = Math.max(1, ...present.flatMap((s) => s.points.map((p) => p[1])));
  const x = (t: number) => margin + ((t - minT) / Math.max(1, maxT - minT)) * (width - 2 * margin);
  const y = (v: number) => height - margin - (v / maxV) * (height - 2 * margin);
  const colors = ["#2563eb", "#dc2626", "#059669", "#d97706"];
  const parts = [
    `<svg class="backorder-series" viewBox="0 0 ${width} ${height}" role="img">`,
    `<line class="axis" x1="${margin}" y1="${height - margin}" x2="${width - margin}" y2="${height - margin}"/>`,
  ];
  present.forEach((s, i) => {
    const d = s.points.map(([t, v]) => `${x(t)},${y(v)}`).join(" ");
    parts.push(
      `<polyline class="series" data-label="${esc(s.label)}" data-points="${s.points.length}" ` +
        `fill="none" stroke="${colors[i % colors.length]}" points="${d}"/>`,
      `<text class="series-label" x="${width - margin + 2}" ` +
        `y="${y(s.points[s.points.length - 1]?.[1] ?? 0)}" ` +
        `fill="${colors[i % colors.length]}">${esc(s.label)}</text>`,
    );
  });
  parts.push("</svg>");
  return parts.join("\n");
}
