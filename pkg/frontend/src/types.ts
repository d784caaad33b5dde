/** Payload shapes of the coplan service API (mirrors docs/openapi.json). */

export type Actor = "supplier" | "customer";
export type Orientation = "gains" | "costs";

export interface StrategyStat {
  strategy: string;
  worst: number;
  best: number;
}

export interface AlphaInterval {
  lo: number;
  hi: number;
  winners: string[];
  recommended: string;
}

export interface Breakpoint {
  alpha: number;
  exact: string | null;
}

export interface CriterionPayload {
  criterion: string;
  values: Record<string, number>;
  winners: string[];
  winner: string;
}

export interface RiskDiagramPayload {
  orientation: Orientation;
  strategies: StrategyStat[];
  intervals: AlphaInterval[];
  breakpoints: Breakpoint[];
  criteria: Record<string, CriterionPayload>;
}

export interface RegretCell {
  reference: string;
  used: string;
  min: number;
  max: number;
}

export interface RegretTablePayload {
  strategies: string[];
  cells: RegretCell[];
}

export interface RiskPayload {
  experiment: string;
  actor: Actor;
  penalties: Record<string, number>;
  diagram: RiskDiagramPayload;
  regret_table: RegretTablePayload;
}

export interface ResultRow {
  strategy: string;
  trend: string;
  consolidation: string;
  visibility: string;
  global_gain: number;
  global_costs: number;
  production_cost: number;
  inventory_cost: number;
  backorder_cost: number;
  purchasing_cost: number;
}

export interface ResultsPayload {
  experiment: string;
  rows: ResultRow[];
}

export interface ExperimentMeta {
  run_id: string;
  status: string;
  parent: string | null;
  delta: Record<string, unknown>;
  n_rows: number;
  source?: string;
  progress?: { done: number; total: number };
}

export interface WhatIfResponse {
  experiment: string | null;
  status?: string;
  parent?: string;
  base?: string;
  supplier?: RiskPayload;
  customer?: RiskPayload;
}

export interface DecisionRecord {
  supplier_strategy: string;
  visibility: string;
  author: string;
  recorded_at: number;
}
