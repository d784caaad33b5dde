"""Pure-numpy fallback implementations of the simplex kernels.

Semantics must match ``numba_impl`` exactly: same tie-breaking (lowest
index) and the same tolerance checks.
"""

import numpy as np

NB_LOWER = 0  # nonbasic at lower bound
NB_UPPER = 1  # nonbasic at upper bound
BASIC = 2


def eliminate(M: np.ndarray, r: int, q: int) -> None:
    """Pivot the tableau in place: normalize row r, zero column q elsewhere."""
    piv = M[r, q]
    M[r, :] /= piv
    col = M[:, q].copy()
    col[r] = 0.0
    M -= np.outer(col, M[r, :])
    M[:, q] = 0.0
    M[r, q] = 1.0


def ratio_test(w, xb, lo_b, up_b, cap, tol):
    """Smallest blocking step when basics move by -w per unit of entering step.

    Returns (step, blocking_row, leave_at_upper).  blocking_row is -1 when
    the entering variable's own bound flip (cap) binds first, or when the
    step is unbounded (step == inf).
    """
    m = w.shape[0]
    steps = np.full(m, np.inf)
    dec = w > tol
    inc = w < -tol
    steps[dec] = (xb[dec] - lo_b[dec]) / w[dec]
    finite_up = inc & np.isfinite(up_b)
    steps[finite_up] = (up_b[finite_up] - xb[finite_up]) / (-w[finite_up])
    steps = np.maximum(steps, 0.0)

    best_row = -1
    best = cap
    if m:
        r = int(np.argmin(steps))
        if steps[r] < best:
            best = float(steps[r])
            best_row = r
    leave_at_upper = bool(best_row >= 0 and w[best_row] < 0.0)
    return best, best_row, leave_at_upper


def choose_entering(d, state, blocked, tol, bland):
    """Index of the entering column for a maximization step, or -1.

    Eligible: nonbasic-at-lower with reduced cost > tol, or
    nonbasic-at-upper with reduced cost < -tol.  Dantzig picks the largest
    violation (ties -> lowest index); Bland picks the lowest index.
    """
    eligible = ~blocked & (
        ((state == NB_LOWER) & (d > tol)) | ((state == NB_UPPER) & (d < -tol))
    )
    idx = np.nonzero(eligible)[0]
    if idx.size == 0:
        return -1
    if bland:
        return int(idx[0])
    scores = np.abs(d[idx])
    return int(idx[int(np.argmax(scores))])
