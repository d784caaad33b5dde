"""In-house LP/MIP optimizer: two-phase bounded-variable simplex plus
best-first branch-and-bound over binary variables."""

from coplan.solver.model import (
    LinearProgram,
    MixedIntegerProgram,
    Relation,
    Solution,
    SolveLimits,
    SolverTolerances,
    Status,
)
from coplan.solver.simplex import solve_lp
from coplan.solver.branch_bound import enumerate_oracle, solve_mip
from coplan.solver.lptext import read_lp_text, write_lp_text

__all__ = [
    "LinearProgram",
    "MixedIntegerProgram",
    "Relation",
    "Solution",
    "SolveLimits",
    "SolverTolerances",
    "Status",
    "solve_lp",
    "solve_mip",
    "enumerate_oracle",
    "read_lp_text",
    "write_lp_text",
]
