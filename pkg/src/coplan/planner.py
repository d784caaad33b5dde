"""Supplier planning model: builds the per-step production MILP, applies
frozen-horizon fixing from the commit ledger, and extracts/commits plans.

Decision families and their anticipation delays:

  X   internal production (launch period; lands after the internal lead)
  ST  subcontracted production (launch period; lands after its lead)
  HS  extra hours used in a period
  B   binary workforce actions (overcapacity per period)
  A   component purchases, keyed supplier:component, by delivery period

A decision for period t must be frozen once t < step + delay(family); the
ledger records every frozen value exactly once.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

import numpy as np

from coplan.solver.model import LinearProgram, MixedIntegerProgram, Relation, Solution, Status

_ID = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")

FAMILIES = ("X", "ST", "HS", "B", "A")


class PlanningError(ValueError):
    """Problem construction failed (domain mismatch, bound conflicts)."""


class LedgerConflictError(RuntimeError):
    """A frozen decision was re-committed with a different value."""


class ExtractionError(RuntimeError):
    """Solver outcome unusable or inconsistent with the balance equations."""


def _check_id(name: str) -> str:
    if not _ID.match(name):
        raise ValueError(f"identifier {name!r} must be alphanumeric/underscore")
    return name


@dataclass(frozen=True)
class ProductSpec:
    id: str
    revenue: float = 200.0  # selling price per unit
    load: float = 2.0  # capacity time-units per unit
    production_cost: float = 5.0
    subcontract_cost: float = 70.0
    holding_cost: float = 10.0
    backorder_cost: float = 20.0


@dataclass(frozen=True)
class ComponentSpec:
    id: str
    holding_cost: float = 1.0


@dataclass(frozen=True)
class SupplierSpec:
    id: str
    costs: dict[str, float]  # purchase cost per component
    anticipation: int  # periods of required anticipation


@dataclass(frozen=True)
class WorkforceAction:
    id: str
    overcapacity: float  # extra time-units per period while active
    cost: float  # currency per active period


@dataclass
class PlanningParameters:
    """Everything the per-step planning MILP needs, including the boundary
    state (inventories at step-1 and the in-flight pipeline)."""

    products: list[ProductSpec]
    components: list[ComponentSpec]
    bom: dict[str, dict[str, float]]  # product -> component -> units per unit
    suppliers: list[SupplierSpec]
    horizon: int = 12
    capacity: float = 100.0
    extra_hours_cost: float = 30.0
    extra_hours_max: float = 20.0
    lead_internal: int = 1
    lead_subcontract: int = 2
    delay_subcontract: int = 2
    delay_extra_hours: int = 1
    delay_workforce: int = 1
    actions: list[WorkforceAction] = field(default_factory=list)
    inventory_cap: float | None = None
    initial_stock: dict[str, float] = field(default_factory=dict)
    initial_backlog: dict[str, float] = field(default_factory=dict)
    initial_component_stock: dict[str, float] = field(default_factory=dict)
    # in-flight decisions predating the first step: (family, ident, period) -> qty
    pipeline: dict[tuple[str, str, int], float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for p in self.products:
            _check_id(p.id)
        for c in self.components:
            _check_id(c.id)
        for s in self.suppliers:
            _check_id(s.id)
        for a in self.actions:
            _check_id(a.id)
        numbers = [
            self.capacity,
            self.extra_hours_cost,
            self.extra_hours_max,
            self.lead_internal,
            self.lead_subcontract,
            self.delay_subcontract,
            self.delay_extra_hours,
            self.delay_workforce,
        ]
        if any(v < 0 for v in numbers):
            raise ValueError("costs, leads, delays and caps must be nonnegative")
        if self.horizon <= max(self.lead_internal, self.lead_subcontract):
            raise ValueError("planning horizon must exceed the longest lead time")
        if self.inventory_cap is not None and self.inventory_cap < 0:
            raise ValueError("inventory cap must be nonnegative")
        for s in self.suppliers:
            if s.anticipation < 0:
                raise ValueError("anticipation delays must be nonnegative")
            missing = [c.id for c in self.components if c.id not in s.costs]
            if missing:
                raise ValueError(f"supplier {s.id} lacks costs for {missing}")
        for p in self.products:
            if p.id not in self.bom:
                raise ValueError(f"product {p.id} missing from the bill of materials")

    def delay(self, family: str, ident: str = "") -> int:
        if family == "X":
            return 0
        if family == "ST":
            return self.delay_subcontract
        if family == "HS":
            return self.delay_extra_hours
        if family == "B":
            return self.delay_workforce
        if family == "A":
            supplier = ident.split(":", 1)[0]
            for s in self.suppliers:
                if s.id == supplier:
                    return s.anticipation
            raise KeyError(f"unknown supplier {supplier!r}")
        raise KeyError(f"unknown decision family {family!r}")

    def purchase_idents(self) -> list[str]:
        return [f"{s.id}:{c.id}" for s in self.suppliers for c in self.components]


def default_parameters(inventory_cap: float | None = None) -> PlanningParameters:
    """Single-product parameter set: one product assembled from two
    components bought at two rank-2 suppliers, one optional second shift."""
    return PlanningParameters(
        products=[ProductSpec(id="P")],
        components=[ComponentSpec(id="C1", holding_cost=1.0), ComponentSpec(id="C2", holding_cost=0.5)],
        bom={"P": {"C1": 1.0, "C2": 2.0}},
        suppliers=[
            SupplierSpec(id="s1", costs={"C1": 2.0, "C2": 1.0}, anticipation=4),
            SupplierSpec(id="s2", costs={"C1": 3.0, "C2": 2.0}, anticipation=2),
        ],
        actions=[WorkforceAction(id="second_shift", overcapacity=50.0, cost=1500.0)],
        inventory_cap=inventory_cap,
    )


class CommitLedger:
    """Write-once store of frozen decision values.

    Keys are (family, ident, period); values may be re-asserted with the
    same number but never overwritten with a different one.
    """

    __slots__ = ("entries", "committed_at")

    def __init__(self) -> None:
        self.entries: dict[tuple[str, str, int], float] = {}
        self.committed_at: dict[tuple[str, str, int], int] = {}

    def copy(self) -> "CommitLedger":
        out = CommitLedger()
        out.entries = dict(self.entries)
        out.committed_at = dict(self.committed_at)
        return out

    def get(self, family: str, ident: str, period: int, default: float = 0.0) -> float:
        return self.entries.get((family, ident, period), default)

    def has(self, family: str, ident: str, period: int) -> bool:
        return (family, ident, period) in self.entries

    def record(self, family: str, ident: str, period: int, value: float, step: int) -> None:
        key = (family, ident, period)
        if family == "B":
            rounded = round(value)
            if abs(value - rounded) > 1e-6 or rounded not in (0, 1):
                raise LedgerConflictError(f"binary value {value} for {key} is not 0/1")
            value = float(rounded)
        if key in self.entries:
            if abs(self.entries[key] - value) > 1e-6:
                raise LedgerConflictError(
                    f"{key} already committed as {self.entries[key]}, refusing {value}"
                )
            return
        self.entries[key] = value
        self.committed_at[key] = step

    def records(self) -> list[dict]:
        out = []
        for (family, ident, period), value in sorted(self.entries.items()):
            out.append(
                {
                    "family": family,
                    "ident": ident,
                    "period": period,
                    "value": value,
                    "committed_at": self.committed_at[(family, ident, period)],
                }
            )
        return out


@dataclass
class ProductionPlan:
    """Named decision/state values of one solved planning step."""

    step: int
    objective: float
    production: dict[tuple[str, int], float]  # X[p, t]
    subcontract: dict[tuple[str, int], float]  # ST[p, t]
    extra_hours: dict[int, float]  # HS[t]
    actions: dict[tuple[str, int], float]  # B[a, t]
    purchases: dict[tuple[str, str, int], float]  # A[s, c, t] by delivery period
    stock: dict[tuple[str, int], float]  # I+[p, t]
    backlog: dict[tuple[str, int], float]  # I-[p, t]
    component_stock: dict[tuple[str, int], float]  # J[c, t]
    delivered: dict[tuple[str, int], float]  # V[p, t]

    def family_values(self, params: PlanningParameters) -> list[tuple[str, str, int, float]]:
        """Decision values as (family, ident, period, value) tuples."""
        out: list[tuple[str, str, int, float]] = []
        for (p, t), v in self.production.items():
            out.append(("X", p, t, v))
        for (p, t), v in self.subcontract.items():
            out.append(("ST", p, t, v))
        for t, v in self.extra_hours.items():
            out.append(("HS", "", t, v))
        for (a, t), v in self.actions.items():
            out.append(("B", a, t, v))
        for (s, c, t), v in self.purchases.items():
            out.append(("A", f"{s}:{c}", t, v))
        return out


@dataclass
class PlanningProblem:
    """A built MILP plus the metadata needed to read a solution back."""

    mip: MixedIntegerProgram
    params: PlanningParameters
    step: int
    dhat: dict[tuple[str, int], float]
    var_index: dict[str, int]
    # ledger/pipeline constants substituted for pre-window lags at build time
    lag_constants: dict[tuple[str, str, int], float] = field(default_factory=dict)
    row_names: list[str] = field(default_factory=list)

    @property
    def lp(self) -> LinearProgram:
        return self.mip.lp


def _normalize_dhat(
    params: PlanningParameters, dhat: dict, step: int
) -> dict[tuple[str, int], float]:
    """Accept {period: qty} (single product) or {(product, period): qty}."""
    window = range(step, step + params.horizon)
    out: dict[tuple[str, int], float] = {}
    if all(isinstance(k, tuple) for k in dhat):
        for (p, t), v in dhat.items():
            out[(str(p), int(t))] = float(v)
    else:
        if len(params.products) != 1:
            raise PlanningError("period-keyed demand requires a single product")
        pid = params.products[0].id
        for t, v in dhat.items():
            out[(pid, int(t))] = float(v)
    for p in params.products:
        for t in window:
            if (p.id, t) not in out:
                raise PlanningError(
                    f"demand missing for product {p.id} period {t} (window {window.start}..{window.stop - 1})"
                )
    return out


def _var_name(family: str, ident: str, t: int) -> str:
    # ":" is the row-label separator in LP text; "." is safe in names there
    ident = ident.replace(":", ".")
    return f"{family}_{ident}_{t}" if ident else f"{family}_{t}"


def build_problem(
    params: PlanningParameters,
    dhat: dict,
    ledger: CommitLedger,
    step: int,
) -> PlanningProblem:
    """Assemble the planning MILP for one step.

    Objective: revenue on delivered quantities minus holding, backorder,
    production, subcontracting, purchasing, workforce and extra-hour
    costs.  Delivered quantity is the demand served in t including backlog
    recovery: dhat(p,t) + backlog(p,t-1) - backlog(p,t).
    """
    demand = _normalize_dhat(params, dhat, step)
    window = list(range(step, step + params.horizon))
    HP = params.horizon

    names: list[str] = []
    lo: list[float] = []
    up: list[float] = []
    var_index: dict[str, int] = {}
    binaries: list[int] = []

    def add_var(family: str, ident: str, t: int, upper: float, binary: bool = False) -> int:
        name = _var_name(family, ident, t)
        idx = len(names)
        var_index[name] = idx
        names.append(name)
        lo.append(0.0)
        up.append(upper)
        if binary:
            binaries.append(idx)
        return idx

    cap = params.inventory_cap if params.inventory_cap is not None else np.inf
    for t in window:
        for p in params.products:
            add_var("X", p.id, t, np.inf)
        for p in params.products:
            add_var("ST", p.id, t, np.inf)
        add_var("HS", "", t, params.extra_hours_max)
        for a in params.actions:
            add_var("B", a.id, t, 1.0, binary=True)
        for ident in params.purchase_idents():
            add_var("A", ident, t, np.inf)
        for p in params.products:
            add_var("Ip", p.id, t, cap)
        for p in params.products:
            add_var("Im", p.id, t, np.inf)
        for c in params.components:
            add_var("J", c.id, t, np.inf)

    n = len(names)
    lo_arr = np.asarray(lo)
    up_arr = np.asarray(up)

    def vid(family: str, ident: str, t: int) -> int:
        return var_index[_var_name(family, ident, t)]

    # frozen-horizon fixing: decisions inside a family's anticipation window
    # are pinned to their ledger value (0 when absent); an existing ledger
    # entry is binding even past the window (frozen means frozen)
    def pipeline_value(family: str, ident: str, t: int) -> float:
        if ledger.has(family, ident, t):
            return ledger.get(family, ident, t)
        return params.pipeline.get((family, ident, t), 0.0)

    def fix_if_frozen(family: str, ident: str, t: int) -> None:
        if t >= step + params.delay(family, ident) and not ledger.has(family, ident, t):
            return
        idx = vid(family, ident, t)
        value = pipeline_value(family, ident, t)
        if value < -1e-9 or value > up_arr[idx] + 1e-9:
            raise PlanningError(
                f"ledger value {value} for {family}/{ident}/{t} conflicts with bounds"
                f" [0, {up_arr[idx]}]"
            )
        lo_arr[idx] = up_arr[idx] = min(max(value, 0.0), up_arr[idx])

    for t in window:
        for p in params.products:
            fix_if_frozen("X", p.id, t)
            fix_if_frozen("ST", p.id, t)
        fix_if_frozen("HS", "", t)
        for a in params.actions:
            fix_if_frozen("B", a.id, t)
        for ident in params.purchase_idents():
            fix_if_frozen("A", ident, t)

    rows: list[dict[int, float]] = []
    rels: list[Relation] = []
    rhs: list[float] = []
    row_names: list[str] = []
    lag_constants: dict[tuple[str, str, int], float] = {}

    def lag_value(family: str, ident: str, t: int) -> float:
        value = pipeline_value(family, ident, t)
        lag_constants[(family, ident, t)] = value
        return value

    def add_row(name: str, coefs: dict[int, float], rel: Relation, b: float) -> None:
        rows.append(coefs)
        rels.append(rel)
        rhs.append(b)
        row_names.append(name)

    obj = np.zeros(n)
    offset = 0.0

    for p in params.products:
        pid = p.id
        i_plus0 = params.initial_stock.get(pid, 0.0)
        i_minus0 = params.initial_backlog.get(pid, 0.0)
        for t in window:
            # finished-goods balance with production lags
            coefs: dict[int, float] = {
                vid("Ip", pid, t): 1.0,
                vid("Im", pid, t): -1.0,
            }
            b = -demand[(pid, t)]
            if t - 1 >= step:
                coefs[vid("Ip", pid, t - 1)] = -1.0
                coefs[vid("Im", pid, t - 1)] = 1.0
            else:
                b += i_plus0 - i_minus0
            t_x = t - params.lead_internal
            if t_x >= step:
                coefs[vid("X", pid, t_x)] = coefs.get(vid("X", pid, t_x), 0.0) - 1.0
            else:
                b += lag_value("X", pid, t_x)
            t_st = t - params.lead_subcontract
            if t_st >= step:
                coefs[vid("ST", pid, t_st)] = coefs.get(vid("ST", pid, t_st), 0.0) - 1.0
            else:
                b += lag_value("ST", pid, t_st)
            add_row(f"balance_{pid}_{t}", coefs, Relation.EQ, b)

    for t in window:
        # capacity: internal load within nominal + activated + extra hours
        coefs = {vid("X", p.id, t): p.load for p in params.products}
        for a in params.actions:
            coefs[vid("B", a.id, t)] = -a.overcapacity
        coefs[vid("HS", "", t)] = -1.0
        add_row(f"capacity_{t}", coefs, Relation.LE, params.capacity)

    for c in params.components:
        cid = c.id
        j0 = params.initial_component_stock.get(cid, 0.0)
        for t in window:
            # component balance
            coefs = {vid("J", cid, t): 1.0}
            b = 0.0
            if t - 1 >= step:
                coefs[vid("J", cid, t - 1)] = -1.0
            else:
                b += j0
            for p in params.products:
                alpha = params.bom[p.id].get(cid, 0.0)
                if alpha:
                    coefs[vid("X", p.id, t)] = coefs.get(vid("X", p.id, t), 0.0) + alpha
                    coefs[vid("ST", p.id, t)] = coefs.get(vid("ST", p.id, t), 0.0) + alpha
            for s in params.suppliers:
                coefs[vid("A", f"{s.id}:{cid}", t)] = -1.0
            add_row(f"component_balance_{cid}_{t}", coefs, Relation.EQ, b)
            # availability: consumption limited by last period's stock
            coefs = {}
            for p in params.products:
                alpha = params.bom[p.id].get(cid, 0.0)
                if alpha:
                    coefs[vid("X", p.id, t)] = alpha
                    coefs[vid("ST", p.id, t)] = alpha
            b = 0.0
            if t - 1 >= step:
                coefs[vid("J", cid, t - 1)] = -1.0
            else:
                b = j0
            add_row(f"availability_{cid}_{t}", coefs, Relation.LE, b)

    # objective: revenue accrues on delivered = dhat + backlog(t-1) - backlog(t)
    for p in params.products:
        pid = p.id
        for t in window:
            offset += p.revenue * demand[(pid, t)]
            obj[vid("Im", pid, t)] -= p.revenue
            if t - 1 >= step:
                obj[vid("Im", pid, t - 1)] += p.revenue
            else:
                offset += p.revenue * params.initial_backlog.get(pid, 0.0)
            obj[vid("Ip", pid, t)] -= p.holding_cost
            obj[vid("Im", pid, t)] -= p.backorder_cost
            obj[vid("X", pid, t)] -= p.production_cost
            obj[vid("ST", pid, t)] -= p.subcontract_cost
    for t in window:
        obj[vid("HS", "", t)] -= params.extra_hours_cost
        for a in params.actions:
            obj[vid("B", a.id, t)] -= a.cost
        for c in params.components:
            obj[vid("J", c.id, t)] -= c.holding_cost
        for s in params.suppliers:
            for c in params.components:
                obj[vid("A", f"{s.id}:{c.id}", t)] -= s.costs[c.id]

    A = np.zeros((len(rows), n))
    for i, coefs in enumerate(rows):
        for j, v in coefs.items():
            A[i, j] = v
    lp = LinearProgram(
        c=obj,
        A=A,
        relations=rels,
        b=np.asarray(rhs),
        lo=lo_arr,
        up=up_arr,
        offset=offset,
        names=names,
    )
    mip = MixedIntegerProgram(lp=lp, binaries=binaries)
    return PlanningProblem(
        mip=mip,
        params=params,
        step=step,
        dhat=demand,
        var_index=var_index,
        lag_constants=lag_constants,
        row_names=row_names,
    )


def extract_plan(problem: PlanningProblem, solution: Solution) -> ProductionPlan:
    """Read solver values back into named fields; verifies the balance
    equations to 1e-6 and recomputes delivered quantities."""
    if solution.status not in (Status.OPTIMAL, Status.INCUMBENT_AT_LIMIT):
        raise ExtractionError(f"solution unusable: status={solution.status.value}")
    if solution.values is None:
        raise ExtractionError("solution carries no variable values")
    params = problem.params
    step = problem.step
    window = list(range(step, step + params.horizon))
    x = solution.values

    def val(family: str, ident: str, t: int) -> float:
        return float(x[problem.var_index[_var_name(family, ident, t)]])

    production = {(p.id, t): val("X", p.id, t) for p in params.products for t in window}
    subcontract = {(p.id, t): val("ST", p.id, t) for p in params.products for t in window}
    extra_hours = {t: val("HS", "", t) for t in window}
    actions = {(a.id, t): val("B", a.id, t) for a in params.actions for t in window}
    purchases = {
        (s.id, c.id, t): val("A", f"{s.id}:{c.id}", t)
        for s in params.suppliers
        for c in params.components
        for t in window
    }
    stock = {(p.id, t): val("Ip", p.id, t) for p in params.products for t in window}
    backlog = {(p.id, t): val("Im", p.id, t) for p in params.products for t in window}
    component_stock = {(c.id, t): val("J", c.id, t) for c in params.components for t in window}

    def lag_value(family: str, ident: str, t: int) -> float:
        return problem.lag_constants.get((family, ident, t), 0.0)

    delivered: dict[tuple[str, int], float] = {}
    for p in params.products:
        pid = p.id
        prev_plus = params.initial_stock.get(pid, 0.0)
        prev_minus = params.initial_backlog.get(pid, 0.0)
        for t in window:
            d = problem.dhat[(pid, t)]
            delivered[(pid, t)] = d + prev_minus - backlog[(pid, t)]
            t_x = t - params.lead_internal
            x_in = production[(pid, t_x)] if t_x >= step else lag_value("X", pid, t_x)
            t_st = t - params.lead_subcontract
            st_in = subcontract[(pid, t_st)] if t_st >= step else lag_value("ST", pid, t_st)
            residual = (
                stock[(pid, t)]
                - backlog[(pid, t)]
                - prev_plus
                + prev_minus
                - x_in
                - st_in
                + d
            )
            if abs(residual) > 1e-6:
                raise ExtractionError(
                    f"balance residual {residual:.3e} for product {pid} period {t}"
                )
            prev_plus = stock[(pid, t)]
            prev_minus = backlog[(pid, t)]

    return ProductionPlan(
        step=step,
        objective=float(solution.objective),
        production=production,
        subcontract=subcontract,
        extra_hours=extra_hours,
        actions=actions,
        purchases=purchases,
        stock=stock,
        backlog=backlog,
        component_stock=component_stock,
        delivered=delivered,
    )


def commit(
    plan: ProductionPlan,
    ledger: CommitLedger,
    step: int,
    period: int,
    params: PlanningParameters,
) -> CommitLedger:
    """Freeze every decision that will no longer be revisable at step+period.

    For each family, periods t < step + period + delay(family) are written;
    already-frozen entries are re-asserted (a differing value raises)."""
    out = ledger.copy()
    for family, ident, t, value in plan.family_values(params):
        if t < step + period + params.delay(family, ident):
            out.record(family, ident, t, value, step)
    return out
