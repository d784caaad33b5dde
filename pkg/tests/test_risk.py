"""Risk layer tests against the published outcome tables.

The breakpoint oracle is a dense grid scan over the optimism axis,
independent of the pairwise-intersection envelope implementation.
"""

import csv
from fractions import Fraction
from pathlib import Path

import pytest

from coplan.risk import (
    AlphaInterval,
    Orientation,
    OrientationError,
    OutcomeMatrix,
    apply_penalties,
    breakpoints,
    hurwicz,
    laplace,
    regret_table,
    savage,
    wald,
)

DATA = Path(__file__).resolve().parents[1] / "src" / "coplan" / "data"


def read_rows(name):
    with open(DATA / name, newline="") as fh:
        return [dict(r) for r in csv.DictReader(fh)]


def supplier_matrix(name="table4.csv"):
    rows = read_rows(name)
    cells = {}
    scenarios = []
    for r in rows:
        sc = f"{r['trend']}-{r['consolidation']}-{r['visibility']}"
        if sc not in scenarios:
            scenarios.append(sc)
        cells[(r["strategy"], sc)] = int(r["global_gain"])
    return OutcomeMatrix.build(
        Orientation.GAIN_HIGHER_BETTER, ["S1", "S2"], scenarios, cells
    )


def customer_matrix(name="table4.csv"):
    rows = read_rows(name)
    cells = {}
    scenarios = []
    for r in rows:
        sc = f"{r['trend']}-{r['consolidation']}-{r['strategy']}"
        if sc not in scenarios:
            scenarios.append(sc)
        cells[(r["visibility"], sc)] = int(r["backorder_cost"])
    return OutcomeMatrix.build(
        Orientation.COST_LOWER_BETTER, ["V1", "V2", "V3", "V4"], scenarios, cells
    )


def grid_scan_breakpoints(outcomes, steps=200_000):
    """Oracle: walk a dense alpha grid and record argbest changes."""
    labels = outcomes.strategies
    stats = {s: (outcomes.worst(s), outcomes.best(s)) for s in labels}
    better = max if outcomes.gains else min

    def argbest(alpha):
        vals = {s: (1 - alpha) * stats[s][0] + alpha * stats[s][1] for s in labels}
        best = better(vals.values())
        return tuple(sorted(s for s, v in vals.items() if v == best))

    changes = []
    prev = argbest(Fraction(0))
    for k in range(1, steps + 1):
        alpha = Fraction(k, steps)
        cur = argbest(alpha)
        if cur != prev:
            changes.append((alpha, prev, cur))
            prev = cur
    return changes


class TestHurwicz:
    def test_alpha_zero_is_worst_gain(self):
        m = supplier_matrix()
        assert hurwicz(m, "S1", 0) == 235470

    def test_alpha_one_is_best_gain(self):
        m = supplier_matrix()
        assert hurwicz(m, "S1", 1) == 478610

    def test_degenerate_row(self):
        m = OutcomeMatrix.build(
            Orientation.GAIN_HIGHER_BETTER, ["A", "B"], ["x"], {("A", "x"): 7, ("B", "x"): 7}
        )
        assert hurwicz(m, "A", 0.5) == 7

    def test_alpha_out_of_range(self):
        with pytest.raises(ValueError):
            hurwicz(supplier_matrix(), "S1", 1.5)

    def test_costs_orientation_pessimism_is_max(self):
        m = customer_matrix()
        assert hurwicz(m, "V1", 0) == 96040  # worst backorder cost
        assert hurwicz(m, "V1", 1) == 0


class TestBreakpointsSupplier:
    def test_first_run_breakpoint(self):
        diagram = breakpoints(supplier_matrix())
        assert diagram.stats["S1"] == (235470, 478610)
        assert diagram.stats["S2"] == (264853, 473611)
        assert len(diagram.breakpoints) == 1
        alpha = diagram.breakpoints[0]
        assert alpha == Fraction(29383, 34382)  # ~0.8546
        assert abs(float(alpha) - 0.855) <= 1e-3
        assert diagram.recommended_at(0.5) == "S2"
        assert diagram.recommended_at(0.99) == "S1"

    def test_matches_grid_oracle(self):
        diagram = breakpoints(supplier_matrix())
        changes = grid_scan_breakpoints(supplier_matrix())
        assert len(changes) == len(diagram.breakpoints)
        for (approx_alpha, _, _), exact_alpha in zip(changes, diagram.breakpoints):
            assert abs(float(approx_alpha) - float(exact_alpha)) <= 1e-5

    def test_second_run_breakpoint(self):
        diagram = breakpoints(supplier_matrix("table9.csv"))
        assert diagram.stats["S1"] == (236485, 467933)
        assert diagram.stats["S2"] == (264853, 467861)
        assert diagram.breakpoints == (Fraction(394, 395),)
        assert abs(float(diagram.breakpoints[0]) - 0.9975) <= 1e-3

    def test_identical_strategies_no_breakpoints(self):
        m = OutcomeMatrix.build(
            Orientation.GAIN_HIGHER_BETTER,
            ["B", "A"],
            ["x", "y"],
            {("A", "x"): 1, ("A", "y"): 5, ("B", "x"): 1, ("B", "y"): 5},
        )
        diagram = breakpoints(m)
        assert diagram.breakpoints == ()
        assert diagram.intervals[0].winners == ("A", "B")  # label order
        assert diagram.intervals[0].recommended == "A"


class TestBreakpointsCustomer:
    def test_first_run_envelope(self):
        diagram = breakpoints(customer_matrix())
        assert diagram.breakpoints == (Fraction(761, 766),)
        assert abs(float(diagram.breakpoints[0]) - 0.9935) <= 1e-3
        assert diagram.intervals[0].recommended == "V4"
        assert diagram.intervals[-1].recommended == "V1"

    def test_second_run_envelope_interval_structure(self):
        diagram = breakpoints(customer_matrix("table9.csv"))
        recommended = [iv.recommended for iv in diagram.intervals]
        assert recommended == ["V4", "V3", "V2", "V1"]
        bps = [float(a) for a in diagram.breakpoints]
        assert diagram.breakpoints == (
            Fraction(7, 57),
            Fraction(511, 541),
            Fraction(33, 34),
        )
        assert abs(bps[0] - 0.123) <= 2e-3
        assert abs(bps[1] - 0.944) <= 2e-3

    def test_matches_grid_oracle(self):
        diagram = breakpoints(customer_matrix("table9.csv"))
        changes = grid_scan_breakpoints(customer_matrix("table9.csv"))
        assert len(changes) == len(diagram.breakpoints)
        for (approx_alpha, _, _), exact_alpha in zip(changes, diagram.breakpoints):
            assert abs(float(approx_alpha) - float(exact_alpha)) <= 1e-5


class TestCriteria:
    def test_laplace_supplier_winner(self):
        res = laplace(supplier_matrix())
        assert res.winner == "S1"
        assert res.values["S1"] == Fraction(5812062, 16)
        assert res.values["S2"] == Fraction(5712875, 16)

    def test_laplace_single_scenario(self):
        m = OutcomeMatrix.build(
            Orientation.GAIN_HIGHER_BETTER, ["A", "B"], ["x"], {("A", "x"): 3, ("B", "x"): 1}
        )
        assert laplace(m).values["A"] == 3

    def test_laplace_tie_reported(self):
        m = OutcomeMatrix.build(
            Orientation.GAIN_HIGHER_BETTER,
            ["A", "B"],
            ["x", "y"],
            {("A", "x"): 2, ("A", "y"): 4, ("B", "x"): 4, ("B", "y"): 2},
        )
        assert laplace(m).winners == ("A", "B")

    def test_wald_supplier_winner(self):
        res = wald(supplier_matrix())
        assert res.winner == "S2"
        assert res.values == {"S1": 235470, "S2": 264853}

    def test_wald_equals_hurwicz_at_zero(self):
        m = supplier_matrix()
        res = wald(m)
        for s in m.strategies:
            assert res.values[s] == hurwicz(m, s, 0)

    def test_wald_customer_costs(self):
        res = wald(customer_matrix())
        assert res.values["V4"] == 19940
        assert res.winner == "V4"

    def test_savage_supplier(self):
        res = savage(supplier_matrix())
        assert res.values == {"S1": 46597, "S2": 73034}
        assert res.winner == "S1"

    def test_savage_single_strategy_zero(self):
        m = OutcomeMatrix.build(
            Orientation.GAIN_HIGHER_BETTER, ["A"], ["x", "y"], {("A", "x"): 3, ("A", "y"): 9}
        )
        assert savage(m).values["A"] == 0

    def test_savage_dominant_strategy(self):
        m = OutcomeMatrix.build(
            Orientation.GAIN_HIGHER_BETTER,
            ["A", "B"],
            ["x", "y"],
            {("A", "x"): 5, ("A", "y"): 9, ("B", "x"): 4, ("B", "y"): 2},
        )
        res = savage(m)
        assert res.values["A"] == 0
        assert res.winner == "A"


TABLE6 = {("S1", "S2"): (-46597, 73034), ("S2", "S1"): (-73034, 46597)}

TABLE7 = {
    ("V1", "V2"): (-44240, 300),
    ("V1", "V3"): (-65400, 900),
    ("V1", "V4"): (-76100, 900),
    ("V2", "V1"): (-300, 44240),
    ("V2", "V3"): (-21440, 600),
    ("V2", "V4"): (-32200, 600),
    ("V3", "V1"): (-900, 65400),
    ("V3", "V2"): (-600, 21440),
    ("V3", "V4"): (-10760, 0),
    ("V4", "V1"): (-900, 76100),
    ("V4", "V2"): (-600, 32200),
    ("V4", "V3"): (0, 10760),
}

TABLE10 = {
    ("V1", "V2"): (-43240, 1300),
    ("V1", "V3"): (-63400, 2900),
    ("V1", "V4"): (-63760, 5900),
    ("V2", "V1"): (-1300, 43240),
    ("V2", "V3"): (-20440, 1600),
    ("V2", "V4"): (-20860, 4600),
    ("V3", "V1"): (-2900, 63400),
    ("V3", "V2"): (-1600, 20440),
    ("V3", "V4"): (-420, 3000),
    ("V4", "V1"): (-5900, 63760),
    ("V4", "V2"): (-4600, 20860),
    ("V4", "V3"): (-3000, 420),
}


class TestRegretTable:
    def test_supplier_pairwise_regrets(self):
        table = regret_table(supplier_matrix())
        for key, expected in TABLE6.items():
            assert table.cell(*key) == expected

    def test_customer_first_run(self):
        table = regret_table(customer_matrix())
        for key, expected in TABLE7.items():
            assert table.cell(*key) == expected, key

    def test_customer_second_run(self):
        table = regret_table(customer_matrix("table9.csv"))
        for key, expected in TABLE10.items():
            assert table.cell(*key) == expected, key

    def test_skew_symmetry_and_zero_diagonal(self):
        for matrix in (supplier_matrix(), customer_matrix(), customer_matrix("table9.csv")):
            table = regret_table(matrix)
            for a in matrix.strategies:
                assert table.cell(a, a) == (0, 0)
                for b in matrix.strategies:
                    lo_ab, hi_ab = table.cell(a, b)
                    lo_ba, hi_ba = table.cell(b, a)
                    assert lo_ab == -hi_ba and hi_ab == -lo_ba

    def test_savage_equals_positive_part_of_row_for_two_strategies(self):
        m = supplier_matrix()
        table = regret_table(m)
        res = savage(m)
        for used, other in (("S1", "S2"), ("S2", "S1")):
            assert res.values[used] == max(0, table.cell(other, used)[1])


class TestApplyPenalties:
    PENALTIES = {"V2": 1000, "V3": 2000, "V4": 5000}

    def test_reproduces_second_run_deltas(self):
        penalized = apply_penalties(customer_matrix(), self.PENALTIES)
        # T1/Min/S1 row of the second-run table: 300->1300, 900->2900, 900->5900
        assert penalized.value("V2", "T1-Min-S1") == 1300
        assert penalized.value("V3", "T1-Min-S1") == 2900
        assert penalized.value("V4", "T1-Min-S1") == 5900

    def test_zero_penalties_identity(self):
        m = customer_matrix()
        assert apply_penalties(m, {}) == m

    def test_penalized_regret_cell(self):
        penalized = apply_penalties(customer_matrix(), self.PENALTIES)
        table = regret_table(penalized)
        assert table.cell("V1", "V2") == (-43240, 1300)

    def test_rejects_gain_matrices(self):
        with pytest.raises(OrientationError):
            apply_penalties(supplier_matrix(), self.PENALTIES)


class TestProperties:
    def test_breakpoints_invariant_under_shift_and_scale(self):
        base = supplier_matrix()
        for shift, scale in ((1000, 1), (0, 3), (-500, 7)):
            cells = {
                (s, sc): base.value(s, sc) * scale + shift
                for s in base.strategies
                for sc in base.scenarios
            }
            moved = OutcomeMatrix.build(
                base.orientation, base.strategies, base.scenarios, cells
            )
            assert breakpoints(moved).breakpoints == breakpoints(base).breakpoints

    def test_orientation_duality(self):
        gains = supplier_matrix()
        cells = {
            (s, sc): -gains.value(s, sc) for s in gains.strategies for sc in gains.scenarios
        }
        costs = OutcomeMatrix.build(
            Orientation.COST_LOWER_BETTER, gains.strategies, gains.scenarios, cells
        )
        assert wald(costs).winners == wald(gains).winners
        assert laplace(costs).winners == laplace(gains).winners
        assert savage(costs).winners == savage(gains).winners
        assert breakpoints(costs).breakpoints == breakpoints(gains).breakpoints

    def test_envelope_edges_match_criteria(self):
        for matrix in (supplier_matrix(), customer_matrix()):
            diagram = breakpoints(matrix)
            assert diagram.intervals[0].recommended in wald(matrix).winners

    def test_float_inputs_still_work(self):
        m = OutcomeMatrix.build(
            Orientation.GAIN_HIGHER_BETTER,
            ["A", "B"],
            ["x", "y"],
            {("A", "x"): 1.25, ("A", "y"): 9.5, ("B", "x"): 3.5, ("B", "y"): 4.75},
        )
        diagram = breakpoints(m)
        assert len(diagram.breakpoints) == 1
        # lines: A: 1.25 + 8.25a, B: 3.5 + 1.25a -> equal at a = 2.25/7
        assert diagram.breakpoints[0] == pytest.approx(2.25 / 7.0, abs=1e-9)
