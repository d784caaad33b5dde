"""Two-phase primal simplex for LPs with bounded variables.

Dense tableau, Dantzig pricing with a Bland's-rule fallback once too many
degenerate pivots accumulate, and a final basis refactorization that
recomputes basic values from the original data to wash out pivot drift.
"""

from __future__ import annotations

import numpy as np

from coplan.solver import kernels
from coplan.solver.kernels.numpy_impl import BASIC, NB_LOWER, NB_UPPER
from coplan.solver.model import (
    DEFAULT_TOLERANCES,
    LinearProgram,
    Relation,
    Solution,
    SolverTolerances,
    Status,
)


class SimplexError(RuntimeError):
    """Raised when the pivot loop fails to make progress (numerical trouble)."""


def _normalized_rows(lp: LinearProgram) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rewrite GE rows as LE; returns (A, b, is_equality)."""
    A = lp.A.copy()
    b = lp.b.copy()
    is_eq = np.zeros(lp.n_rows, dtype=bool)
    for i, rel in enumerate(lp.relations):
        if rel is Relation.GE:
            A[i] = -A[i]
            b[i] = -b[i]
        elif rel is Relation.EQ:
            is_eq[i] = True
    return A, b, is_eq


def _residuals(lp: LinearProgram, x: np.ndarray) -> float:
    """Worst constraint/bound violation of x against the original program."""
    r = lp.A @ x - lp.b
    worst = 0.0
    for i, rel in enumerate(lp.relations):
        if rel is Relation.LE:
            v = max(0.0, r[i])
        elif rel is Relation.GE:
            v = max(0.0, -r[i])
        else:
            v = abs(r[i])
        worst = max(worst, v)
    worst = max(worst, float(np.max(np.maximum(lp.lo - x, 0.0), initial=0.0)))
    finite = np.isfinite(lp.up)
    if np.any(finite):
        worst = max(worst, float(np.max(np.maximum(x[finite] - lp.up[finite], 0.0))))
    return worst


def solve_lp(
    lp: LinearProgram,
    tols: SolverTolerances = DEFAULT_TOLERANCES,
    max_iterations: int | None = None,
) -> Solution:
    """Solve a maximization LP; returns Optimal, Infeasible or Unbounded."""
    m, n = lp.n_rows, lp.n_vars
    A, b, is_eq = _normalized_rows(lp)

    # columns: n structural | m slacks | m artificials
    n_slack = m
    total = n + 2 * m
    A_ext = np.zeros((m, total))
    A_ext[:, :n] = A
    lo = np.full(total, 0.0)
    up = np.full(total, np.inf)
    lo[:n] = lp.lo
    up[:n] = lp.up
    for i in range(m):
        A_ext[i, n + i] = 1.0
        if is_eq[i]:
            up[n + i] = 0.0  # equality row: slack pinned to zero

    state = np.full(total, NB_LOWER, dtype=np.int8)
    blocked = (up - lo) <= 0.0
    x_nb = lo.copy()  # nonbasic values (all start at lower bounds)

    resid = b - A_ext[:, : n + n_slack] @ x_nb[: n + n_slack]

    basis = np.empty(m, dtype=np.int64)
    art_sign = np.ones(m)
    xb = np.zeros(m)
    any_artificial = False
    for i in range(m):
        slack_ok = (not is_eq[i] and resid[i] >= 0.0) or (is_eq[i] and resid[i] == 0.0)
        art = n + n_slack + i
        if slack_ok:
            basis[i] = n + i
            xb[i] = resid[i]
            up[art] = 0.0
        else:
            any_artificial = True
            art_sign[i] = 1.0 if resid[i] >= 0.0 else -1.0
            A_ext[i, art] = art_sign[i]
            basis[i] = art
            xb[i] = abs(resid[i])
        blocked[n + n_slack + i] = True  # artificials never re-enter
    state[basis] = BASIC

    # tableau: B^-1 A_ext (basis is diagonal +-1 here), phase-1 and phase-2
    # reduced-cost rows appended
    M = np.empty((m + 2, total))
    scale = np.ones(m)
    for i in range(m):
        if basis[i] >= n + n_slack:
            scale[i] = art_sign[i]
    M[:m] = A_ext * scale[:, None]
    # phase 1: maximize -sum(artificials); basic artificial rows carry cost -1
    c1 = np.zeros(total)
    c1[n + n_slack :] = -1.0
    d1 = c1.copy()
    for i in range(m):
        if basis[i] >= n + n_slack:
            d1 += M[i]
    d1[basis] = 0.0
    M[m] = d1
    c2 = np.zeros(total)
    c2[:n] = lp.c
    M[m + 1] = c2
    M[m + 1][basis] = 0.0

    iter_cap = max_iterations or (200 * (m + total) + 2000)
    bland = False
    degen = 0
    degen_limit = 5 * (m + total)
    iterations = 0
    entering_tol = tols.pivot

    def iterate(cost_row: int, phase: int) -> str:
        nonlocal bland, degen, iterations, xb
        while True:
            j = kernels.choose_entering(M[cost_row], state, blocked, entering_tol, bland)
            if j < 0:
                return "optimal"
            delta = 1.0 if state[j] == NB_LOWER else -1.0
            w = M[:m, j] * delta
            cap = up[j] - lo[j]
            t, row, leave_upper = kernels.ratio_test(
                w, xb, lo[basis], up[basis], cap, tols.pivot
            )
            if not np.isfinite(t):
                if phase == 1:
                    raise SimplexError("phase-1 step unbounded (numerical failure)")
                return "unbounded"
            if t <= tols.degenerate_step:
                degen += 1
                if degen > degen_limit:
                    bland = True
            if row < 0:
                # bound flip: no basis change
                xb -= w * t
                state[j] = NB_UPPER if state[j] == NB_LOWER else NB_LOWER
                x_nb[j] = up[j] if state[j] == NB_UPPER else lo[j]
            else:
                leaving = basis[row]
                xb -= w * t
                entering_val = (lo[j] if delta > 0 else up[j]) + delta * t
                xb[row] = entering_val
                state[leaving] = NB_UPPER if leave_upper else NB_LOWER
                x_nb[leaving] = up[leaving] if leave_upper else lo[leaving]
                basis[row] = j
                state[j] = BASIC
                kernels.eliminate(M, row, j)
            iterations += 1
            if iterations > iter_cap:
                raise SimplexError(f"iteration limit {iter_cap} exceeded")

    if any_artificial:
        iterate(m, phase=1)
        infeas = sum(xb[i] for i in range(m) if basis[i] >= n + n_slack)
        if infeas > tols.feasibility * max(1.0, float(np.max(np.abs(b), initial=1.0))):
            return Solution(Status.INFEASIBLE, iterations=iterations)
        # drive leftover (zero-valued) artificials out of the basis
        for i in range(m):
            if basis[i] < n + n_slack:
                continue
            pivot_col = -1
            for j in range(n + n_slack):
                if state[j] != BASIC and abs(M[i, j]) > 1e-7:
                    pivot_col = j
                    break
            if pivot_col < 0:
                continue  # redundant row: artificial stays basic, pinned at 0
            leaving = basis[i]
            state[leaving] = NB_LOWER
            x_nb[leaving] = 0.0
            basis[i] = pivot_col
            xb[i] = x_nb[pivot_col]
            state[pivot_col] = BASIC
            kernels.eliminate(M, i, pivot_col)
        up[n + n_slack :] = 0.0  # any artificial still basic is pinned

    outcome = iterate(m + 1, phase=2)
    if outcome == "unbounded":
        return Solution(Status.UNBOUNDED, iterations=iterations)

    # refactorize: recompute basic values from the original columns
    x_full = x_nb.copy()
    B = A_ext[:, basis]
    nb_mask = np.ones(total, dtype=bool)
    nb_mask[basis] = False
    rhs = b - A_ext[:, nb_mask] @ x_nb[nb_mask]
    try:
        xb_refined = np.linalg.solve(B, rhs)
    except np.linalg.LinAlgError:
        xb_refined = xb
    drift = float(np.max(np.abs(xb_refined - xb), initial=0.0))
    if drift > 1e-5:
        xb_refined = xb  # refactorization disagrees wildly; trust the tableau
    x_full[basis] = np.clip(xb_refined, lo[basis], up[basis])

    x = x_full[:n]
    objective = float(lp.c @ x) + lp.offset
    return Solution(
        Status.OPTIMAL,
        objective=objective,
        values=x.copy(),
        best_bound=objective,
        node_count=0,
        iterations=iterations,
        max_residual=_residuals(lp, x),
    )
