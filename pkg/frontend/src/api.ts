/** Typed client for the coplan service; the transport is injectable so
 * tests can stub it. */

import type {
  Actor,
  DecisionRecord,
  ExperimentMeta,
  ResultsPayload,
  RiskPayload,
  WhatIfResponse,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export function formatPenalties(penalties: Record<string, number>): string {
  return Object.keys(penalties)
    .sort()
    .map((k) => `${k}:${penalties[k]}`)
    .join(",");
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const body = await res.json().catch(() => ({}));
    if (!res.ok) {
      const detail = (body as { detail?: { code?: string } }).detail;
      throw new ApiError(res.status, detail?.code ?? "error", JSON.stringify(body));
    }
    return body as T;
  }

  health(): Promise<{ status: string }> {
    return this.request("/health");
  }

  async experiments(): Promise<ExperimentMeta[]> {
    const body = await this.request<{ experiments: ExperimentMeta[] }>("/experiments");
    return body.experiments;
  }

  experiment(id: string): Promise<ExperimentMeta> {
    return this.request(`/experiments/${encodeURIComponent(id)}`);
  }

  results(id: string): Promise<ResultsPayload> {
    return this.request(`/experiments/${encodeURIComponent(id)}/results`);
  }

  risk(id: string, actor: Actor, penalties: Record<string, number> = {}): Promise<RiskPayload> {
    const params = new URLSearchParams({ actor });
    const pen = formatPenalties(penalties);
    if (pen) params.set("penalties", pen);
    return this.request(`/experiments/${encodeURIComponent(id)}/risk?${params.toString()}`);
  }

  async trace(id: string, scenario: string): Promise<string> {
    const res = await this.fetchFn(
      `${this.baseUrl}/experiments/${encodeURIComponent(id)}/traces/${encodeURIComponent(scenario)}`,
    );
    if (!res.ok) throw new ApiError(res.status, "trace_not_found", scenario);
    return res.text();
  }

  whatIf(body: {
    base: string;
    penalties?: Record<string, number>;
    inventory_cap?: number;
  }): Promise<WhatIfResponse> {
    return this.request("/whatif", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  recordDecision(
    id: string,
    pair: { supplier_strategy: string; visibility: string; author?: string },
  ): Promise<DecisionRecord> {
    return this.request(`/experiments/${encodeURIComponent(id)}/decision`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(pair),
    });
  }

  async decisions(id: string): Promise<DecisionRecord[]> {
    const body = await this.request<{ decisions: DecisionRecord[] }>(
      `/experiments/${encodeURIComponent(id)}/decision`,
    );
    return body.decisions;
  }
}
