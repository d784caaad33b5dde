"""Planning MILP construction, extraction and commit-ledger tests."""

import numpy as np
import pytest

from coplan.planner import (
    CommitLedger,
    ComponentSpec,
    ExtractionError,
    LedgerConflictError,
    PlanningError,
    PlanningParameters,
    ProductSpec,
    SupplierSpec,
    build_problem,
    commit,
    default_parameters,
    extract_plan,
)
from coplan.solver import Status, enumerate_oracle, read_lp_text, solve_mip, write_lp_text


def recompute_gain(plan, params, dhat):
    """Independent objective recomputation, term by term.

    revenue on delivered minus holding, component holding, backorders,
    production, subcontracting, purchasing, workforce and extra hours.
    """
    by_product = {p.id: p for p in params.products}
    by_component = {c.id: c for c in params.components}
    supplier_cost = {s.id: s.costs for s in params.suppliers}
    action_cost = {a.id: a.cost for a in params.actions}
    total = 0.0
    for (pid, t), v in plan.delivered.items():
        total += by_product[pid].revenue * v
    for (pid, t), v in plan.stock.items():
        total -= by_product[pid].holding_cost * v
    for (cid, t), v in plan.component_stock.items():
        total -= by_component[cid].holding_cost * v
    for (pid, t), v in plan.backlog.items():
        total -= by_product[pid].backorder_cost * v
    for (pid, t), v in plan.production.items():
        total -= by_product[pid].production_cost * v
    for (pid, t), v in plan.subcontract.items():
        total -= by_product[pid].subcontract_cost * v
    for (s, c, t), v in plan.purchases.items():
        total -= supplier_cost[s][c] * v
    for (a, t), v in plan.actions.items():
        total -= action_cost[a] * v
    for t, v in plan.extra_hours.items():
        total -= params.extra_hours_cost * v
    return total


def flat_demand(params, step, qty):
    return {t: float(qty) for t in range(step, step + params.horizon)}


def toy_params(**overrides):
    """Small single-product system for hand-checkable instances."""
    base = dict(
        products=[ProductSpec(id="P")],
        components=[ComponentSpec(id="C1")],
        bom={"P": {"C1": 1.0}},
        suppliers=[SupplierSpec(id="s1", costs={"C1": 2.0}, anticipation=0)],
        horizon=3,
        capacity=1000.0,
        extra_hours_max=0.0,
        lead_internal=1,
        lead_subcontract=2,
        delay_subcontract=0,
        delay_extra_hours=0,
        delay_workforce=0,
        actions=[],
    )
    base.update(overrides)
    return PlanningParameters(**base)


class TestBuildProblem:
    def test_variable_count_and_binaries(self):
        params = default_parameters()
        problem = build_problem(params, flat_demand(params, 1, 50.0), CommitLedger(), 1)
        # per period: X, ST, HS, B, 4 purchases, I+, I-, 2 component stocks
        assert problem.mip.lp.n_vars == 12 * 12
        assert len(problem.mip.binaries) == 12

    def test_subcontract_frozen_first_two_periods(self):
        params = default_parameters()
        problem = build_problem(params, flat_demand(params, 1, 50.0), CommitLedger(), 1)
        lp = problem.lp
        for t in (1, 2):
            j = problem.var_index[f"ST_P_{t}"]
            assert lp.lo[j] == lp.up[j] == 0.0
        j = problem.var_index["ST_P_3"]
        assert lp.up[j] == np.inf

    def test_purchases_frozen_per_supplier_delay(self):
        params = default_parameters()
        problem = build_problem(params, flat_demand(params, 1, 50.0), CommitLedger(), 1)
        lp = problem.lp
        for t in range(1, 5):  # s1 anticipation 4
            j = problem.var_index[f"A_s1.C1_{t}"]
            assert lp.lo[j] == lp.up[j] == 0.0
        for t in (1, 2):  # s2 anticipation 2
            j = problem.var_index[f"A_s2.C1_{t}"]
            assert lp.lo[j] == lp.up[j] == 0.0
        assert lp.up[problem.var_index["A_s2.C1_3"]] == np.inf

    def test_demand_domain_mismatch(self):
        params = default_parameters()
        with pytest.raises(PlanningError):
            build_problem(params, {1: 50.0}, CommitLedger(), 1)

    def test_ledger_value_conflicting_with_bounds(self):
        params = default_parameters()
        ledger = CommitLedger()
        ledger.record("HS", "", 1, params.extra_hours_max + 5.0, step=0)
        with pytest.raises(PlanningError):
            build_problem(params, flat_demand(params, 1, 50.0), ledger, 1)

    def test_zero_demand_zero_stock_gives_null_plan(self):
        params = toy_params()
        problem = build_problem(params, flat_demand(params, 1, 0.0), CommitLedger(), 1)
        sol = solve_mip(problem.mip)
        assert sol.status is Status.OPTIMAL
        assert sol.objective == pytest.approx(0.0, abs=1e-9)
        plan = extract_plan(problem, sol)
        for group in (plan.production, plan.subcontract, plan.purchases, plan.backlog):
            assert all(abs(v) <= 1e-9 for v in group.values())

    def test_pipeline_serves_demand(self):
        # demand 10 in period 1; 10 units launched at period 0 land exactly there
        params = toy_params(
            horizon=2,
            lead_subcontract=1,
            pipeline={("X", "P", 0): 10.0},
        )
        problem = build_problem(params, {1: 10.0, 2: 0.0}, CommitLedger(), 1)
        sol = solve_mip(problem.mip)
        plan = extract_plan(problem, sol)
        assert plan.backlog[("P", 1)] == pytest.approx(0.0, abs=1e-9)
        assert plan.delivered[("P", 1)] == pytest.approx(10.0, abs=1e-9)
        assert sol.objective == pytest.approx(10.0 * 200.0, abs=1e-6)

    def test_inventory_cap_respected(self):
        params = default_parameters(inventory_cap=80.0)
        params.initial_component_stock = {"C1": 2000.0, "C2": 4000.0}
        problem = build_problem(params, flat_demand(params, 1, 50.0), CommitLedger(), 1)
        sol = solve_mip(problem.mip)
        assert sol.status is Status.OPTIMAL
        plan = extract_plan(problem, sol)
        assert max(plan.stock.values()) <= 80.0 + 1e-6

    def test_lp_text_dump_round_trips(self):
        params = default_parameters()
        problem = build_problem(params, flat_demand(params, 1, 50.0), CommitLedger(), 1)
        text = write_lp_text(problem.mip)
        back = read_lp_text(text)
        assert back.lp.names == problem.lp.names
        assert np.array_equal(back.lp.c, problem.lp.c)
        assert np.array_equal(back.lp.b, problem.lp.b)
        assert back.binaries == problem.mip.binaries


class TestSolveAndExtract:
    def make_solved(self, demand_qty=50.0, step=1):
        params = default_parameters()
        params.initial_component_stock = {"C1": 150.0, "C2": 300.0}
        params.pipeline = {("X", "P", 0): 50.0}
        problem = build_problem(params, flat_demand(params, step, demand_qty), CommitLedger(), step)
        sol = solve_mip(problem.mip)
        assert sol.status is Status.OPTIMAL
        return params, problem, sol

    def test_objective_matches_term_recomputation(self):
        params, problem, sol = self.make_solved()
        plan = extract_plan(problem, sol)
        recomputed = recompute_gain(plan, params, problem.dhat)
        assert abs(recomputed - plan.objective) <= 1e-6 * max(1.0, abs(plan.objective))

    def test_balance_residuals_small(self):
        params, problem, sol = self.make_solved()
        plan = extract_plan(problem, sol)  # raises above 1e-6 internally
        assert plan is not None

    def test_extract_refuses_infeasible(self):
        params = toy_params()
        problem = build_problem(params, flat_demand(params, 1, 0.0), CommitLedger(), 1)
        from coplan.solver import Solution

        with pytest.raises(ExtractionError):
            extract_plan(problem, Solution(Status.INFEASIBLE))

    def test_small_instance_matches_enumeration(self):
        # 4 periods, one workforce action -> 4 binaries
        params = default_parameters()
        params.horizon = 4
        params.initial_component_stock = {"C1": 400.0, "C2": 800.0}
        params.pipeline = {("X", "P", 0): 50.0}
        problem = build_problem(params, flat_demand(params, 1, 60.0), CommitLedger(), 1)
        assert len(problem.mip.binaries) == 4
        best = solve_mip(problem.mip)
        oracle = enumerate_oracle(problem.mip)
        assert best.objective == pytest.approx(
            oracle.objective, rel=1e-6, abs=1e-6 * max(1.0, abs(oracle.objective))
        )


class TestCommit:
    def test_commit_windows_per_family(self):
        params, problem, sol = TestSolveAndExtract().make_solved()
        plan = extract_plan(problem, sol)
        ledger = commit(plan, CommitLedger(), step=1, period=2, params=params)
        periods = lambda fam, ident: sorted(
            t for (f, i, t) in ledger.entries if f == fam and i == ident
        )
        assert periods("X", "P") == [1, 2]  # no anticipation: executed periods only
        assert periods("HS", "") == [1, 2, 3]  # delay 1 -> t < 1+2+1
        assert periods("ST", "P") == [1, 2, 3, 4]  # delay 2
        assert periods("A", "s1:C1") == [1, 2, 3, 4, 5, 6]  # anticipation 4
        assert periods("A", "s2:C1") == [1, 2, 3, 4]  # anticipation 2

    def test_overwrite_with_different_value_raises(self):
        ledger = CommitLedger()
        ledger.record("X", "P", 3, 10.0, step=1)
        ledger.record("X", "P", 3, 10.0, step=3)  # re-assert is fine
        with pytest.raises(LedgerConflictError):
            ledger.record("X", "P", 3, 11.0, step=3)

    def test_binary_values_snap_to_01(self):
        ledger = CommitLedger()
        ledger.record("B", "second_shift", 2, 0.9999999, step=1)
        assert ledger.get("B", "second_shift", 2) == 1.0
        with pytest.raises(LedgerConflictError):
            ledger.record("B", "a", 1, 0.4, step=1)

    def test_fixing_idempotence(self):
        params, problem, sol = TestSolveAndExtract().make_solved()
        plan = extract_plan(problem, sol)
        ledger = commit(plan, CommitLedger(), step=1, period=2, params=params)
        problem2 = build_problem(params, problem.dhat, ledger, 1)
        sol2 = solve_mip(problem2.mip)
        plan2 = extract_plan(problem2, sol2)
        for family, ident, t, value in plan2.family_values(params):
            if (family, ident, t) in ledger.entries:
                assert value == pytest.approx(ledger.entries[(family, ident, t)], abs=1e-7)

    def test_monotone_freezing(self):
        params, problem, sol = TestSolveAndExtract().make_solved()
        plan = extract_plan(problem, sol)
        ledger1 = commit(plan, CommitLedger(), step=1, period=2, params=params)
        # advance: rebuild at step 3 with rolled state and commit again
        params3 = params
        problem3 = build_problem(params3, flat_demand(params3, 3, 50.0), ledger1, 3)
        sol3 = solve_mip(problem3.mip)
        plan3 = extract_plan(problem3, sol3)
        ledger2 = commit(plan3, ledger1, step=3, period=2, params=params3)
        assert set(ledger1.entries) <= set(ledger2.entries)
