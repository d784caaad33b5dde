"""Best-first branch-and-bound over the binary variables of a MIP.

Branches on the most-fractional binary (ties: lowest index), explores
nodes in best-LP-bound order with depth-first tie-break, and uses a
round-the-binaries heuristic at the root to seed the incumbent.
"""

from __future__ import annotations

import heapq
import itertools
import time

import numpy as np

from coplan.solver.model import (
    DEFAULT_TOLERANCES,
    LinearProgram,
    MixedIntegerProgram,
    Solution,
    SolveLimits,
    SolverTolerances,
    Status,
)
from coplan.solver.simplex import solve_lp


def _with_bounds(lp: LinearProgram, lo: np.ndarray, up: np.ndarray) -> LinearProgram:
    clone = LinearProgram(
        c=lp.c,
        A=lp.A,
        relations=lp.relations,
        b=lp.b,
        lo=lo,
        up=up,
        offset=lp.offset,
        names=lp.names,
    )
    return clone


def _fractional_binaries(values: np.ndarray, binaries: list[int], tol: float) -> list[int]:
    out = []
    for j in binaries:
        v = values[j]
        if min(abs(v), abs(v - 1.0)) > tol:
            out.append(j)
    return out


def _most_fractional(values: np.ndarray, fractional: list[int]) -> int:
    best = fractional[0]
    best_score = abs(values[best] - 0.5)
    for j in fractional[1:]:
        score = abs(values[j] - 0.5)
        if score < best_score:  # strict: ties keep the lowest index
            best_score = score
            best = j
    return best


def solve_mip(
    mip: MixedIntegerProgram,
    limits: SolveLimits = SolveLimits(),
    tols: SolverTolerances = DEFAULT_TOLERANCES,
) -> Solution:
    """Solve a maximization MIP over binary variables.

    Within budget returns Optimal; with budget exhausted returns the
    incumbent (IncumbentAtLimit) or Unknown when none was found.
    """
    lp = mip.lp
    started = time.monotonic()

    def out_of_budget(nodes: int) -> bool:
        if nodes >= limits.max_nodes:
            return True
        if limits.max_seconds is not None and time.monotonic() - started > limits.max_seconds:
            return True
        return False

    root = solve_lp(lp, tols)
    nodes = 1
    if root.status is Status.INFEASIBLE:
        return Solution(Status.INFEASIBLE, node_count=nodes)
    if root.status is Status.UNBOUNDED:
        return Solution(Status.UNBOUNDED, node_count=nodes)

    incumbent: Solution | None = None
    fractional = _fractional_binaries(root.values, mip.binaries, tols.integrality)
    if not fractional:
        return Solution(
            Status.OPTIMAL,
            objective=root.objective,
            values=root.values,
            best_bound=root.objective,
            node_count=nodes,
            iterations=root.iterations,
            max_residual=root.max_residual,
        )

    def gap_slack(value: float) -> float:
        return tols.gap * max(1.0, abs(value))

    def try_incumbent(candidate: Solution) -> None:
        nonlocal incumbent
        if incumbent is None or candidate.objective > incumbent.objective:
            incumbent = candidate

    # root heuristics: fix every binary to a rounding of the relaxation
    for rounding in ("nearest", "up"):
        lo = lp.lo.copy()
        up = lp.up.copy()
        for j in mip.binaries:
            v = root.values[j]
            fixed = round(v) if rounding == "nearest" else float(np.ceil(v - tols.integrality))
            fixed = min(max(fixed, lp.lo[j]), lp.up[j])
            lo[j] = up[j] = fixed
        sol = solve_lp(_with_bounds(lp, lo, up), tols)
        nodes += 1
        if sol.status is Status.OPTIMAL:
            try_incumbent(sol)

    counter = itertools.count()
    # heap entries: (-bound, -depth, tiebreak, lo, up)
    heap = [(-root.objective, 0, next(counter), lp.lo.copy(), lp.up.copy())]
    pruned_bound = -np.inf

    while heap:
        neg_bound, neg_depth, _, lo, up = heapq.heappop(heap)
        bound_est = -neg_bound
        if incumbent is not None and bound_est <= incumbent.objective + gap_slack(incumbent.objective):
            # best-first order: every remaining node is at least as bad
            pruned_bound = bound_est
            heap.clear()
            break
        if out_of_budget(nodes):
            heapq.heappush(heap, (neg_bound, neg_depth, next(counter), lo, up))
            break
        sol = solve_lp(_with_bounds(lp, lo, up), tols)
        nodes += 1
        if sol.status is not Status.OPTIMAL:
            continue
        if incumbent is not None and sol.objective <= incumbent.objective + gap_slack(incumbent.objective):
            continue
        fractional = _fractional_binaries(sol.values, mip.binaries, tols.integrality)
        if not fractional:
            try_incumbent(sol)
            continue
        j = _most_fractional(sol.values, fractional)
        for value in (0.0, 1.0):
            lo_child = lo.copy()
            up_child = up.copy()
            lo_child[j] = up_child[j] = value
            heapq.heappush(
                heap, (-sol.objective, neg_depth - 1, next(counter), lo_child, up_child)
            )

    open_bound = max((-entry[0] for entry in heap), default=pruned_bound)
    if heap:  # stopped by budget
        if incumbent is None:
            return Solution(Status.UNKNOWN, best_bound=open_bound, node_count=nodes)
        return Solution(
            Status.INCUMBENT_AT_LIMIT,
            objective=incumbent.objective,
            values=incumbent.values,
            best_bound=max(open_bound, incumbent.objective),
            node_count=nodes,
            max_residual=incumbent.max_residual,
        )
    if incumbent is None:
        return Solution(Status.INFEASIBLE, node_count=nodes)
    return Solution(
        Status.OPTIMAL,
        objective=incumbent.objective,
        values=incumbent.values,
        best_bound=max(open_bound, incumbent.objective),
        node_count=nodes,
        max_residual=incumbent.max_residual,
    )


def enumerate_oracle(
    mip: MixedIntegerProgram,
    tols: SolverTolerances = DEFAULT_TOLERANCES,
    max_binaries: int = 20,
) -> Solution:
    """Reference MIP solve: one LP per binary assignment, best kept.

    Refuses instances with more than ``max_binaries`` binaries.
    """
    k = len(mip.binaries)
    if k > max_binaries:
        raise ValueError(f"enumerate_oracle limited to {max_binaries} binaries, got {k}")
    lp = mip.lp
    best: Solution | None = None
    count = 0
    saw_unbounded = False
    for assignment in itertools.product((0.0, 1.0), repeat=k):
        lo = lp.lo.copy()
        up = lp.up.copy()
        conflict = False
        for j, v in zip(mip.binaries, assignment):
            if v < lp.lo[j] - 1e-12 or v > lp.up[j] + 1e-12:
                conflict = True  # assignment contradicts pre-fixed bounds
                break
            lo[j] = up[j] = v
        if conflict:
            continue
        count += 1
        sol = solve_lp(_with_bounds(lp, lo, up), tols)
        if sol.status is Status.UNBOUNDED:
            saw_unbounded = True
        if sol.status is not Status.OPTIMAL:
            continue
        if best is None or sol.objective > best.objective:
            best = sol
    if best is None:
        return Solution(Status.UNBOUNDED if saw_unbounded else Status.INFEASIBLE, node_count=count)
    return Solution(
        Status.OPTIMAL,
        objective=best.objective,
        values=best.values,
        best_bound=best.objective,
        node_count=count,
        max_residual=best.max_residual,
    )
