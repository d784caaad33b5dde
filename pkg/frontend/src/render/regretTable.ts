/** Regret table renderer: cells carry the exact payload numbers in
 * data-min/data-max (and as visible text), a sign class for coloring, and
 * a data-pair key linking each cell to its skew-symmetric mirror for
 * hover pairing. */

import { cellText } from "../format.js";
import type { RegretTablePayload } from "../types.js";

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

function signClass(min: number, max: number): string {
  if (min === 0 && max === 0) return "neutral";
  if (max <= 0) return "favorable"; // never a regret to switch
  if (min >= 0) return "adverse";
  return "mixed";
}

export function renderRegretTable(payload: RegretTablePayload | null): string {
  if (!payload) {
    return `<div class="table-skeleton" data-state="empty">regret table not loaded</div>`;
  }
  const byKey = new Map(payload.cells.map((c) => [`${c.reference}|${c.used}`, c]));
  const head = payload.strategies
    .map((s) => `<th scope="col">using ${esc(s)}</th>`)
    .join("");
  const rows: string[] = [];
  for (const ref of payload.strategies) {
    const cells: string[] = [];
    for (const used of payload.strategies) {
      const cell = byKey.get(`${ref}|${used}`);
      if (!cell) {
        cells.push(`<td class="missing"></td>`);
        continue;
      }
      const pair = [cell.reference, cell.used].sort().join("|");
      cells.push(
        `<td class="regret ${signClass(cell.min, cell.max)}" ` +
          `data-reference="${esc(cell.reference)}" data-used="${esc(cell.used)}" ` +
          `data-min="${cellText(cell.min)}" data-max="${cellText(cell.max)}" ` +
          `data-pair="${esc(pair)}">` +
          `(${cellText(cell.min)}, ${cellText(cell.max)})</td>`,
      );
    }
    rows.push(`<tr><th scope="row">/ ${esc(ref)}</th>${cells.join("")}</tr>`);
  }
  return (
    `<table class="regret-table"><thead><tr><th></th>${head}</tr></thead>` +
    `<tbody>${rows.join("")}</tbody></table>`
  );
}
