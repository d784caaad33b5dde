"""Round-trip and differential tests for the LP text format."""

import numpy as np
import pytest

from coplan.solver import (
    LinearProgram,
    MixedIntegerProgram,
    Relation,
    Status,
    read_lp_text,
    solve_lp,
    solve_mip,
    write_lp_text,
)

scipy_linprog = pytest.importorskip("scipy.optimize").linprog


def sample_mip():
    lp = LinearProgram(
        c=[10.0, 6.0, 4.0, -1.5],
        A=[[5.0, 4.0, 3.0, 0.0], [1.0, 0.0, 0.0, 2.0], [0.0, 1.0, 1.0, 1.0]],
        relations=[Relation.LE, Relation.GE, Relation.EQ],
        b=[8.0, 0.5, 1.25],
        lo=[0.0, 0.0, 0.0, 0.25],
        up=[1.0, 1.0, 1.0, 5.0],
        offset=3.5,
        names=["buy_a", "buy_b", "buy_c", "level"],
    )
    return MixedIntegerProgram(lp=lp, binaries=[0, 1, 2])


def test_round_trip_preserves_solution():
    prob = sample_mip()
    text = write_lp_text(prob)
    back = read_lp_text(text)
    assert back.lp.names == prob.lp.names
    assert back.lp.offset == prob.lp.offset
    assert [r.value for r in back.lp.relations] == [r.value for r in prob.lp.relations]
    assert np.array_equal(back.lp.c, prob.lp.c)
    assert np.array_equal(back.lp.A, prob.lp.A)
    assert np.array_equal(back.lp.b, prob.lp.b)
    assert np.array_equal(back.lp.lo, prob.lp.lo)
    assert np.array_equal(back.lp.up, prob.lp.up)
    assert back.binaries == prob.binaries

    s1 = solve_mip(prob)
    s2 = solve_mip(back)
    assert s1.status is s2.status
    assert s1.objective == pytest.approx(s2.objective, abs=1e-9)


def test_round_trip_twice_is_identical_text():
    text = write_lp_text(sample_mip())
    assert write_lp_text(read_lp_text(text)) == text


def test_reads_hand_written_lp():
    text = """
Maximize
 obj: 3 x + 2 y + 1
Subject To
 cap: x + y <= 4
 floor: x - y >= -1
Bounds
 0 <= x <= 3
 y >= 0
End
"""
    prob = read_lp_text(text)
    sol = solve_lp(prob.lp)
    assert sol.status is Status.OPTIMAL
    # optimum at x=3, y=1
    assert sol.objective == pytest.approx(3 * 3 + 2 * 1 + 1, abs=1e-8)


def test_rejects_general_integers():
    text = "Maximize\n obj: x\nSubject To\n c0: x <= 2\nGeneral\n x\nEnd\n"
    with pytest.raises(ValueError):
        read_lp_text(text)


def test_differential_against_scipy():
    """Dump LPs to text, re-read, and compare our simplex with scipy HiGHS."""
    rng = np.random.default_rng(42)
    for trial in range(8):
        n, m = 7, 5
        c = rng.integers(-4, 10, size=n).astype(float)
        A = rng.integers(0, 8, size=(m, n)).astype(float)
        A[np.arange(min(m, n)), np.arange(min(m, n))] += 2.0
        b = rng.integers(8, 40, size=m).astype(float)
        up = rng.integers(2, 15, size=n).astype(float)
        lp = LinearProgram(
            c=c, A=A, relations=[Relation.LE] * m, b=b, lo=np.zeros(n), up=up
        )
        back = read_lp_text(write_lp_text(lp)).lp
        ours = solve_lp(back)
        ref = scipy_linprog(-back.c, A_ub=back.A, b_ub=back.b, bounds=list(zip(back.lo, back.up)))
        assert ours.status is Status.OPTIMAL and ref.success, f"trial {trial}"
        assert ours.objective == pytest.approx(-ref.fun + back.offset, abs=1e-6), f"trial {trial}"
