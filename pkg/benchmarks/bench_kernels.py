"""Benchmark the numba simplex kernels against the pure-numpy fallback.

Runs the same pivot workloads and full planning solves through both
backends and prints a comparison table.

    python benchmarks/bench_kernels.py [--pivots N] [--solves N]
"""

import argparse
import time

import numpy as np

import coplan.solver.simplex as sx
from coplan.planner import CommitLedger, build_problem, default_parameters
from coplan.simulator import warm_start
from coplan.solver import solve_mip
from coplan.solver.kernels import numpy_impl

try:
    from coplan.solver.kernels import numba_impl
except ImportError:
    numba_impl = None


def time_eliminate(impl, repeats: int) -> float:
    rng = np.random.default_rng(42)
    M = rng.normal(size=(74, 300))
    M[10, 20] += 5.0
    impl.eliminate(M.copy(), 10, 20)  # warm-up / compile
    work = [M.copy() for _ in range(repeats)]
    t0 = time.perf_counter()
    for w in work:
        impl.eliminate(w, 10, 20)
    return (time.perf_counter() - t0) / repeats


def time_ratio_test(impl, repeats: int) -> float:
    rng = np.random.default_rng(43)
    m = 74
    w = rng.normal(size=m)
    xb = rng.uniform(0, 10, size=m)
    lo = np.zeros(m)
    up = np.where(rng.random(m) < 0.5, np.inf, xb + 1.0)
    impl.ratio_test(w, xb, lo, up, np.inf, 1e-9)
    t0 = time.perf_counter()
    for _ in range(repeats):
        impl.ratio_test(w, xb, lo, up, np.inf, 1e-9)
    return (time.perf_counter() - t0) / repeats


def time_planning_solve(impl, repeats: int) -> float:
    params = warm_start(default_parameters(), 50.0)
    demand = {t: (70.0 if 6 <= t <= 9 else 60.0) for t in range(1, 13)}
    problem = build_problem(params, demand, CommitLedger(), 1)
    sx.kernels = impl
    solve_mip(problem.mip)  # warm-up
    t0 = time.perf_counter()
    for _ in range(repeats):
        solve_mip(problem.mip)
    return (time.perf_counter() - t0) / repeats


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pivots", type=int, default=2000, help="pivot repetitions")
    parser.add_argument("--solves", type=int, default=20, help="full MIP solves")
    args = parser.parse_args()

    backends = [("numpy", numpy_impl)]
    if numba_impl is not None:
        backends.append(("numba", numba_impl))
    else:
        print("numba unavailable; benchmarking the numpy fallback only")

    rows = []
    for name, impl in backends:
        rows.append(
            (
                name,
                time_eliminate(impl, args.pivots) * 1e6,
                time_ratio_test(impl, args.pivots) * 1e6,
                time_planning_solve(impl, args.solves) * 1e3,
            )
        )

    print(f"{'backend':<8} {'eliminate (us)':>15} {'ratio test (us)':>16} {'mip solve (ms)':>15}")
    for name, elim, ratio, solve in rows:
        print(f"{name:<8} {elim:>15.2f} {ratio:>16.2f} {solve:>15.2f}")
    if len(rows) == 2:
        speedup = rows[0][3] / rows[1][3]
        print(f"\nnumba speedup on full solves: {speedup:.2f}x")


if __name__ == "__main__":
    main()
