"""Numba-jitted simplex kernels (hot path).

Mirror of ``numpy_impl``: identical tie-breaking and tolerances so the two
backends are interchangeable.  ``cache=True`` keeps compilation a one-time
cost per machine.
"""

import numpy as np
from numba import njit

NB_LOWER = 0
NB_UPPER = 1
BASIC = 2


@njit(cache=True)
def eliminate(M, r, q):  # pragma: no cover - exercised via backend tests
    nrows, ncols = M.shape
    piv = M[r, q]
    for j in range(ncols):
        M[r, j] /= piv
    for i in range(nrows):
        if i == r:
            continue
        factor = M[i, q]
        if factor != 0.0:
            for j in range(ncols):
                M[i, j] -= factor * M[r, j]
    for i in range(nrows):
        M[i, q] = 0.0
    M[r, q] = 1.0


@njit(cache=True)
def ratio_test(w, xb, lo_b, up_b, cap, tol):  # pragma: no cover
    best = cap
    best_row = -1
    m = w.shape[0]
    for i in range(m):
        wi = w[i]
        if wi > tol:
            step = (xb[i] - lo_b[i]) / wi
        elif wi < -tol and up_b[i] != np.inf:
            step = (up_b[i] - xb[i]) / (-wi)
        else:
            continue
        if step < 0.0:
            step = 0.0
        if step < best:
            best = step
            best_row = i
    leave_at_upper = best_row >= 0 and w[best_row] < 0.0
    return best, best_row, leave_at_upper


@njit(cache=True)
def choose_entering(d, state, blocked, tol, bland):  # pragma: no cover
    n = d.shape[0]
    best = -1
    best_score = tol
    for j in range(n):
        if blocked[j]:
            continue
        dj = d[j]
        if state[j] == NB_LOWER and dj > tol:
            score = dj
        elif state[j] == NB_UPPER and dj < -tol:
            score = -dj
        else:
            continue
        if bland:
            return j
        if score > best_score:
            best_score = score
            best = j
    return best
