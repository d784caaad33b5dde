/** Dashboard controller: owns the view state, talks to the service, and
 * pushes rendered fragments into an injected view so the logic runs
 * headless in tests. */

import { ApiClient, ApiError } from "./api.js";
import { backorderSeriesFromTrace, renderBackorderSeries, renderCostBreakdown } from "./render/charts.js";
import { renderRegretTable } from "./render/regretTable.js";
import { renderRiskDiagram, renderSkeleton } from "./render/riskDiagram.js";
import { DEFAULT_STATE, ViewState, fromQuery, toQuery } from "./state.js";
import type { Actor, DecisionRecord, ExperimentMeta, ResultRow, RiskPayload } from "./types.js";

export interface View {
  setHtml(region: string, html: string): void;
  setText(region: string, text: string): void;
  updateUrl(query: string): void;
}

export interface ControllerOptions {
  pollIntervalMs?: number;
  sleep?: (ms: number) => Promise<void>;
  maxPolls?: number;
}

const REGIONS = {
  supplierDiagram: "supplier-diagram",
  supplierRegret: "supplier-regret",
  customerDiagram: "customer-diagram",
  customerRegret: "customer-regret",
  costChart: "cost-chart",
  backorders: "backorder-chart",
  lineage: "lineage",
  decisions: "decision-history",
  status: "status",
  whatifError: "whatif-error",
} as const;

export class DashboardController {
  state: ViewState;
  meta: ExperimentMeta | null = null;
  supplierRisk: RiskPayload | null = null;
  customerRisk: RiskPayload | null = null;
  rows: ResultRow[] = [];
  decisions: DecisionRecord[] = [];

  private readonly sleep: (ms: number) => Promise<void>;
  private readonly pollIntervalMs: number;
  private readonly maxPolls: number;

  constructor(
    private readonly api: ApiClient,
    private readonly view: View,
    initialQuery = "",
    options: ControllerOptions = {},
  ) {
    this.state = fromQuery(initialQuery);
    this.pollIntervalMs = options.pollIntervalMs ?? 1000;
    this.sleep = options.sleep ?? ((ms) => new Promise((r) => setTimeout(r, ms)));
    this.maxPolls = options.maxPolls ?? 600;
  }

  private pushUrl(): void {
    this.view.updateUrl(toQuery(this.state));
  }

  async start(): Promise<void> {
    if (!this.state.experiment) {
      const experiments = await this.api.experiments();
      const first = experiments[0];
      if (!first) {
        this.view.setText(REGIONS.status, "no experiments in the store");
        this.renderAll();
        return;
      }
      this.state.experiment = first.run_id;
    }
    await this.loadExperiment(this.state.experiment);
  }

  async loadExperiment(id: string): Promise<void> {
    this.state.experiment = id;
    this.view.setText(REGIONS.status, `loading ${id}...`);
    this.meta = await this.api.experiment(id);
    [this.supplierRisk, this.customerRisk] = await Promise.all([
      this.api.risk(id, "supplier"),
      this.api.risk(id, "customer", this.state.penalties),
    ]);
    const results = await this.api.results(id);
    this.rows = results.rows;
    this.decisions = await this.api.decisions(id);
    this.view.setText(REGIONS.status, `experiment ${id} (${this.meta.status})`);
    this.pushUrl();
    this.renderAll();
  }

  renderAll(): void {
    this.renderSide("supplier");
    this.renderSide("customer");
    this.view.setHtml(REGIONS.costChart, renderCostBreakdown(this.rows));
    this.renderLineage();
    this.renderDecisions();
  }

  private renderSide(actor: Actor): void {
    const payload = actor === "supplier" ? this.supplierRisk : this.customerRisk;
    const diagramRegion = actor === "supplier" ? REGIONS.supplierDiagram : REGIONS.customerDiagram;
    const regretRegion = actor === "supplier" ? REGIONS.supplierRegret : REGIONS.customerRegret;
    if (!payload) {
      this.view.setHtml(diagramRegion, renderSkeleton());
      this.view.setHtml(regretRegion, renderRegretTable(null));
      return;
    }
    this.view.setHtml(diagramRegion, renderRiskDiagram(payload.diagram, this.state.alpha));
    this.view.setHtml(regretRegion, renderRegretTable(payload.regret_table));
  }

  private renderLineage(): void {
    if (!this.meta) {
      this.view.setHtml(REGIONS.lineage, "");
      return;
    }
    const parts: string[] = [];
    if (this.meta.parent) {
      const delta = JSON.stringify(this.meta.delta ?? {});
      parts.push(
        `<div class="ribbon" data-parent="${this.meta.parent}">` +
          `second run derived from <a href="?exp=${encodeURIComponent(this.meta.parent)}" ` +
          `data-action="open-experiment" data-id="${this.meta.parent}">${this.meta.parent}</a>` +
          ` (delta ${delta})</div>`,
      );
    }
    this.view.setHtml(REGIONS.lineage, parts.join(""));
  }

  private renderDecisions(): void {
    if (!this.decisions.length) {
      this.view.setHtml(REGIONS.decisions, `<p class="empty">no recorded decisions yet</p>`);
      return;
    }
    const items = this.decisions
      .map(
        (d) =>
          `<li data-pair="${d.supplier_strategy}/${d.visibility}">` +
          `(${d.supplier_strategy}, ${d.visibility}) by ${d.author}</li>`,
      )
      .join("");
    this.view.setHtml(REGIONS.decisions, `<ol class="decision-history">${items}</ol>`);
  }

  /** Slider move: local recompute only, no service round trip. */
  setAlpha(alpha: number): void {
    this.state.alpha = Math.min(1, Math.max(0, alpha));
    this.renderSide("supplier");
    this.renderSide("customer");
    this.pushUrl();
  }

  /** Penalty edits re-query the customer side immediately. */
  async setPenalties(penalties: Record<string, number>): Promise<void> {
    if (!this.state.experiment) return;
    this.state.penalties = { ...penalties };
    try {
      this.customerRisk = await this.api.risk(this.state.experiment, "customer", penalties);
      this.view.setText(REGIONS.whatifError, "");
    } catch (err) {
      if (err instanceof ApiError && err.status === 422) {
        this.view.setText(REGIONS.whatifError, err.message);
        return;
      }
      throw err;
    }
    this.renderSide("customer");
    this.pushUrl();
  }

  /** Cap edits create a derived experiment and switch to it when done. */
  async applyInventoryCap(cap: number): Promise<string | null> {
    if (!this.state.experiment) return null;
    let response;
    try {
      response = await this.api.whatIf({ base: this.state.experiment, inventory_cap: cap });
    } catch (err) {
      if (err instanceof ApiError && err.status === 422) {
        this.view.setText(REGIONS.whatifError, err.message);
        return null;
      }
      throw err;
    }
    const derived = response.experiment;
    if (!derived) return null;
    this.state.cap = cap;
    this.view.setText(REGIONS.status, `derived run ${derived} in progress...`);
    for (let i = 0; i < this.maxPolls; i++) {
      const meta = await this.api.experiment(derived);
      if (meta.status === "complete") break;
      const progress = meta.progress ? ` ${meta.progress.done}/${meta.progress.total}` : "";
      this.view.setText(REGIONS.status, `derived run ${derived}${progress}...`);
      await this.sleep(this.pollIntervalMs);
    }
    await this.loadExperiment(derived);
    return derived;
  }

  async recordDecision(pair: { supplier_strategy: string; visibility: string; author?: string }): Promise<void> {
    if (!this.state.experiment) return;
    try {
      await this.api.recordDecision(this.state.experiment, pair);
      this.view.setText(REGIONS.whatifError, "");
    } catch (err) {
      if (err instanceof ApiError && err.status === 422) {
        this.view.setText(REGIONS.whatifError, err.message);
        return;
      }
      throw err;
    }
    this.decisions = await this.api.decisions(this.state.experiment);
    this.renderDecisions();
  }

  /** Overlay realized backorder series for selected scenarios. */
  async showBackorders(scenarios: string[]): Promise<void> {
    if (!this.state.experiment) return;
    const series = [];
    const missing: string[] = [];
    for (const scenario of scenarios) {
      try {
        const text = await this.api.trace(this.state.experiment, scenario);
        series.push(backorderSeriesFromTrace(text, scenario));
      } catch (err) {
        if (err instanceof ApiError) missing.push(scenario);
        else throw err;
      }
    }
    let html = renderBackorderSeries(series);
    if (missing.length) {
      html += `<p class="chart-note">no trace for: ${missing.join(", ")}</p>`;
    }
    this.view.setHtml(REGIONS.backorders, html);
  }
}

export { REGIONS, DEFAULT_STATE };
