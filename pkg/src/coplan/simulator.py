"""Rolling-horizon simulation engine.

Alternates customer demand rolls with supplier plan/solve/commit steps,
executes the committed decisions of each replanning window against the
realized (firm) demand, and accounts the realized costs into an indicator
set with the standard four-way cost split (production, inventory,
backorder, purchasing).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from coplan.demand import (
    Consolidation,
    CustomerConfig,
    DemandPlan,
    FlexResolution,
    TrendSpec,
    init_demand,
    resolve_deterministic,
    roll_demand,
)
from coplan.planner import (
    CommitLedger,
    PlanningParameters,
    ProductionPlan,
    build_problem,
    commit,
    extract_plan,
)
from coplan.solver import LinearProgram, Relation, SolveLimits, Status, solve_lp, solve_mip

STRATEGY_RESOLUTION = {"S1": FlexResolution.MAX_BOUND, "S2": FlexResolution.MIN_BOUND}
CONSOLIDATION_MODE = {"Min": Consolidation.MIN, "Max": Consolidation.MAX}


class ScenarioAbort(RuntimeError):
    """A planning step proved infeasible; carries step and binding rows."""

    def __init__(self, scenario_id: str, step: int, status: str, binding: list[str]):
        self.scenario_id = scenario_id
        self.step = step
        self.solver_status = status
        self.binding = binding
        detail = f"; binding rows: {', '.join(binding)}" if binding else ""
        super().__init__(
            f"scenario {scenario_id} aborted at step {step} (status {status}){detail}"
        )


@dataclass(frozen=True)
class ScenarioSpec:
    """One fully-resolved experiment cell."""

    trend_label: str
    consolidation_label: str
    visibility_label: str
    strategy_label: str
    trend: TrendSpec
    customer: CustomerConfig
    params: PlanningParameters
    simulation_length: int
    limits: SolveLimits = SolveLimits()

    @property
    def scenario_id(self) -> str:
        return "-".join(
            (
                self.trend_label,
                self.consolidation_label,
                self.visibility_label,
                self.strategy_label,
            )
        )

    @property
    def resolution(self) -> FlexResolution:
        return STRATEGY_RESOLUTION[self.strategy_label]


@dataclass
class StepRecord:
    step: int
    demand_plan: DemandPlan
    dhat: dict[int, float]
    plan: ProductionPlan
    new_commits: list[tuple[str, str, int, float]]
    solver_status: str
    solver_nodes: int
    flagged: bool  # True when the step ran on an incumbent-at-limit plan


@dataclass
class ExecutedPeriod:
    period: int
    demand: float
    arrivals: float  # production + subcontract landing this period
    launched: float  # X launched this period (costed at launch)
    subcontract_launched: float
    extra_hours: float
    actions: dict[str, float]
    purchases: dict[tuple[str, str], float]  # (supplier, component) -> qty
    served: float
    stock: float
    backlog: float
    component_stock: dict[str, float]


@dataclass
class SimulationTrace:
    spec: ScenarioSpec
    steps: list[StepRecord] = field(default_factory=list)
    executed: list[ExecutedPeriod] = field(default_factory=list)
    realized_demand: dict[int, float] = field(default_factory=dict)
    ledger: CommitLedger = field(default_factory=CommitLedger)
    flagged_steps: list[int] = field(default_factory=list)


@dataclass
class IndicatorSet:
    """Realized gains and the four-way cost breakdown plus subcosts."""

    revenue: float = 0.0
    internal_production_cost: float = 0.0
    subcontracting_cost: float = 0.0
    extra_hours_cost: float = 0.0
    workforce_cost: float = 0.0
    finished_holding_cost: float = 0.0
    component_holding_cost: float = 0.0
    backorder_cost: float = 0.0
    purchasing_cost: float = 0.0

    @property
    def production_cost(self) -> float:
        return (
            self.internal_production_cost
            + self.subcontracting_cost
            + self.extra_hours_cost
            + self.workforce_cost
        )

    @property
    def inventory_cost(self) -> float:
        return self.finished_holding_cost + self.component_holding_cost

    @property
    def global_costs(self) -> float:
        return (
            self.production_cost
            + self.inventory_cost
            + self.backorder_cost
            + self.purchasing_cost
        )

    @property
    def global_gain(self) -> float:
        return self.revenue - self.global_costs

    def as_dict(self) -> dict[str, float]:
        return {
            "global_gain": self.global_gain,
            "global_costs": self.global_costs,
            "production_cost": self.production_cost,
            "inventory_cost": self.inventory_cost,
            "backorder_cost": self.backorder_cost,
            "purchasing_cost": self.purchasing_cost,
            "revenue": self.revenue,
            "internal_production_cost": self.internal_production_cost,
            "subcontracting_cost": self.subcontracting_cost,
            "extra_hours_cost": self.extra_hours_cost,
            "workforce_cost": self.workforce_cost,
            "finished_holding_cost": self.finished_holding_cost,
            "component_holding_cost": self.component_holding_cost,
        }


def warm_start(params: PlanningParameters, baseline: float) -> PlanningParameters:
    """Pre-load the pipeline and component stock with the steady state of a
    flat demand at `baseline`, so period-1 service is feasible."""
    pipeline = dict(params.pipeline)
    for p in params.products:
        for j in range(1, params.lead_internal + 1):
            pipeline[("X", p.id, 1 - j)] = baseline
    cover = min((s.anticipation for s in params.suppliers), default=0) + 1
    component_stock = dict(params.initial_component_stock)
    for c in params.components:
        need = sum(params.bom[p.id].get(c.id, 0.0) for p in params.products) * baseline
        component_stock.setdefault(c.id, need * cover)
    return replace(
        params,
        pipeline=pipeline,
        initial_component_stock=component_stock,
    )


def _elastic_violations(lp: LinearProgram, row_names: list[str]) -> list[str]:
    """Rows that cannot be satisfied, found by minimizing elastic slack."""
    m, n = lp.n_rows, lp.n_vars
    pairs = []
    cols = []
    for i, rel in enumerate(lp.relations):
        if rel in (Relation.LE, Relation.EQ):
            col = np.zeros(m)
            col[i] = -1.0
            cols.append(col)
            pairs.append(i)
        if rel in (Relation.GE, Relation.EQ):
            col = np.zeros(m)
            col[i] = 1.0
            cols.append(col)
            pairs.append(i)
    E = np.column_stack(cols) if cols else np.zeros((m, 0))
    elastic = LinearProgram(
        c=np.concatenate([np.zeros(n), -np.ones(E.shape[1])]),
        A=np.hstack([lp.A, E]),
        relations=lp.relations,
        b=lp.b,
        lo=np.concatenate([lp.lo, np.zeros(E.shape[1])]),
        up=np.concatenate([lp.up, np.full(E.shape[1], np.inf)]),
    )
    sol = solve_lp(elastic)
    if sol.status is not Status.OPTIMAL or sol.values is None:
        return []
    out = []
    for k, i in enumerate(pairs):
        if sol.values[n + k] > 1e-6:
            name = row_names[i] if i < len(row_names) else f"row{i}"
            if name not in out:
                out.append(name)
    return out


def run_scenario(spec: ScenarioSpec) -> tuple[SimulationTrace, IndicatorSet]:
    """Run one scenario end to end; deterministic given the spec."""
    if len(spec.params.products) != 1:
        raise ValueError("scenario runs expect a single planned product")
    product = spec.params.products[0]
    cfg = spec.customer
    trace = SimulationTrace(spec=spec)
    ledger = CommitLedger()
    stock = spec.params.initial_stock.get(product.id, 0.0)
    backlog = spec.params.initial_backlog.get(product.id, 0.0)
    component_stock = {
        c.id: spec.params.initial_component_stock.get(c.id, 0.0)
        for c in spec.params.components
    }

    demand_plan: DemandPlan | None = None
    step = 1
    while step + cfg.period - 1 <= spec.simulation_length:
        demand_plan = (
            init_demand(spec.trend, cfg, step)
            if demand_plan is None
            else roll_demand(demand_plan, spec.trend, cfg)
        )
        for t, v in demand_plan.firm.items():
            trace.realized_demand.setdefault(t, v)

        dhat = resolve_deterministic(demand_plan, spec.resolution)
        params_step = replace(
            spec.params,
            initial_stock={product.id: stock},
            initial_backlog={product.id: backlog},
            initial_component_stock=dict(component_stock),
        )
        problem = build_problem(params_step, dhat, ledger, step)
        sol = solve_mip(problem.mip, spec.limits)
        if sol.status in (Status.INFEASIBLE, Status.UNBOUNDED, Status.UNKNOWN):
            binding = (
                _elastic_violations(problem.lp, problem.row_names)
                if sol.status is Status.INFEASIBLE
                else []
            )
            raise ScenarioAbort(spec.scenario_id, step, sol.status.value, binding)
        flagged = sol.status is Status.INCUMBENT_AT_LIMIT
        if flagged:
            trace.flagged_steps.append(step)
        plan = extract_plan(problem, sol)
        before = set(ledger.entries)
        ledger = commit(plan, ledger, step, cfg.period, params_step)
        new_commits = [
            (f, i, t, ledger.entries[(f, i, t)])
            for (f, i, t) in sorted(set(ledger.entries) - before)
        ]
        trace.steps.append(
            StepRecord(
                step=step,
                demand_plan=demand_plan,
                dhat=dhat,
                plan=plan,
                new_commits=new_commits,
                solver_status=sol.status.value,
                solver_nodes=sol.node_count,
                flagged=flagged,
            )
        )

        # execute the replanning window against realized demand
        for t in range(step, step + cfg.period):
            demand_t = trace.realized_demand[t]
            launched = ledger.get("X", product.id, t)
            st_launched = ledger.get("ST", product.id, t)
            t_x = t - spec.params.lead_internal
            t_st = t - spec.params.lead_subcontract
            arrivals = (
                ledger.get("X", product.id, t_x)
                if ledger.has("X", product.id, t_x)
                else spec.params.pipeline.get(("X", product.id, t_x), 0.0)
            ) + (
                ledger.get("ST", product.id, t_st)
                if ledger.has("ST", product.id, t_st)
                else spec.params.pipeline.get(("ST", product.id, t_st), 0.0)
            )
            prev_backlog = backlog
            net = (stock - backlog) + arrivals - demand_t
            stock = max(net, 0.0)
            backlog = max(-net, 0.0)
            served = demand_t + prev_backlog - backlog
            purchases = {}
            for s in spec.params.suppliers:
                for c in spec.params.components:
                    qty = ledger.get("A", f"{s.id}:{c.id}", t)
                    if qty:
                        purchases[(s.id, c.id)] = qty
            for c in spec.params.components:
                alpha = spec.params.bom[product.id].get(c.id, 0.0)
                inflow = sum(q for (s, cid), q in purchases.items() if cid == c.id)
                component_stock[c.id] += inflow - alpha * (launched + st_launched)
            actions = {
                a.id: ledger.get("B", a.id, t) for a in spec.params.actions
            }
            trace.executed.append(
                ExecutedPeriod(
                    period=t,
                    demand=demand_t,
                    arrivals=arrivals,
                    launched=launched,
                    subcontract_launched=st_launched,
                    extra_hours=ledger.get("HS", "", t),
                    actions=actions,
                    purchases=purchases,
                    served=served,
                    stock=stock,
                    backlog=backlog,
                    component_stock=dict(component_stock),
                )
            )
        step += cfg.period

    trace.ledger = ledger
    return trace, compute_indicators(trace, spec.params)


def compute_indicators(trace: SimulationTrace, params: PlanningParameters) -> IndicatorSet:
    """Sum realized quantities times unit costs over executed periods."""
    if not trace.executed and trace.steps:
        raise ValueError("trace has planning steps but no executed periods")
    product = params.products[0]
    comp_cost = {c.id: c.holding_cost for c in params.components}
    supplier_cost = {s.id: s.costs for s in params.suppliers}
    action_cost = {a.id: a.cost for a in params.actions}
    ind = IndicatorSet()
    for ex in trace.executed:
        ind.revenue += product.revenue * ex.served
        ind.internal_production_cost += product.production_cost * ex.launched
        ind.subcontracting_cost += product.subcontract_cost * ex.subcontract_launched
        ind.extra_hours_cost += params.extra_hours_cost * ex.extra_hours
        for a, active in ex.actions.items():
            ind.workforce_cost += action_cost[a] * active
        ind.finished_holding_cost += product.holding_cost * ex.stock
        for c, level in ex.component_stock.items():
            ind.component_holding_cost += comp_cost[c] * level
        ind.backorder_cost += product.backorder_cost * ex.backlog
        for (s, c), qty in ex.purchases.items():
            ind.purchasing_cost += supplier_cost[s][c] * qty
    return ind


def backorder_series(trace: SimulationTrace) -> list[tuple[int, float]]:
    """Realized backorder level per executed period (for plotting)."""
    return [(ex.period, ex.backlog) for ex in trace.executed]


# ---------------------------------------------------------------------------
# trace export (JSON lines)
# ---------------------------------------------------------------------------


def _pairs(d: dict) -> list[list]:
    return [[k, v] for k, v in sorted(d.items())]


def trace_to_jsonl(trace: SimulationTrace, indicators: IndicatorSet) -> str:
    """Line-per-event structured log of one scenario run."""
    spec = trace.spec
    params = spec.params
    lines: list[dict] = []
    lines.append(
        {
            "event": "scenario",
            "id": spec.scenario_id,
            "trend": spec.trend_label,
            "consolidation": spec.consolidation_label,
            "visibility": spec.visibility_label,
            "strategy": spec.strategy_label,
            "simulation_length": spec.simulation_length,
            "firm_len": spec.customer.firm_len,
            "horizon": spec.customer.horizon,
            "period": spec.customer.period,
            "costs": {
                "revenue": params.products[0].revenue,
                "production": params.products[0].production_cost,
                "subcontracting": params.products[0].subcontract_cost,
                "holding": params.products[0].holding_cost,
                "backorder": params.products[0].backorder_cost,
                "extra_hours": params.extra_hours_cost,
                "components": {c.id: c.holding_cost for c in params.components},
                "purchase": {s.id: s.costs for s in params.suppliers},
                "actions": {a.id: a.cost for a in params.actions},
            },
            "temporal": {
                "lead_internal": params.lead_internal,
                "lead_subcontract": params.lead_subcontract,
            },
            "delays": {
                "X": 0,
                "ST": params.delay_subcontract,
                "HS": params.delay_extra_hours,
                "B": params.delay_workforce,
                "A": {s.id: s.anticipation for s in params.suppliers},
            },
            "bom": params.bom,
            "pipeline": [[f, i, t, v] for (f, i, t), v in sorted(params.pipeline.items())],
            "initial_component_stock": params.initial_component_stock,
            "initial_stock": params.initial_stock,
            "initial_backlog": params.initial_backlog,
        }
    )
    for rec in trace.steps:
        lines.append(
            {
                "event": "step",
                "step": rec.step,
                "firm": _pairs(rec.demand_plan.firm),
                "flexible": [
                    [t, iv.lower, iv.upper] for t, iv in sorted(rec.demand_plan.flexible.items())
                ],
                "dhat": _pairs(rec.dhat),
                "objective": rec.plan.objective,
                "status": rec.solver_status,
                "nodes": rec.solver_nodes,
                "flagged": rec.flagged,
                "decisions": [
                    [f, i, t, v] for (f, i, t, v) in sorted(rec.plan.family_values(params))
                ],
            }
        )
        lines.append(
            {
                "event": "commit",
                "step": rec.step,
                "entries": [[f, i, t, v] for (f, i, t, v) in rec.new_commits],
            }
        )
    for ex in trace.executed:
        lines.append(
            {
                "event": "execute",
                "period": ex.period,
                "demand": ex.demand,
                "arrivals": ex.arrivals,
                "launched": ex.launched,
                "subcontract_launched": ex.subcontract_launched,
                "extra_hours": ex.extra_hours,
                "actions": _pairs(ex.actions),
                "purchases": [[s, c, q] for (s, c), q in sorted(ex.purchases.items())],
                "served": ex.served,
                "stock": ex.stock,
                "backlog": ex.backlog,
                "component_stock": _pairs(ex.component_stock),
            }
        )
    lines.append({"event": "indicators", **indicators.as_dict()})
    return "\n".join(json.dumps(line, sort_keys=True) for line in lines) + "\n"
