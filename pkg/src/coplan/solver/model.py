"""Problem and solution containers for the LP/MIP solver."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class Relation(Enum):
    LE = "<="
    EQ = "="
    GE = ">="


class Status(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    INCUMBENT_AT_LIMIT = "incumbent_at_limit"
    # budget exhausted before any incumbent: not proven infeasible
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SolverTolerances:
    """All solver tolerances in one record so tests can reference them."""

    feasibility: float = 1e-7
    integrality: float = 1e-6
    gap: float = 1e-6
    pivot: float = 1e-9
    degenerate_step: float = 1e-9


DEFAULT_TOLERANCES = SolverTolerances()


@dataclass(frozen=True)
class SolveLimits:
    """Node/time budget for branch-and-bound.

    ``max_seconds=None`` keeps runs deterministic; set it only for
    interactive use.
    """

    max_nodes: int = 100_000
    max_seconds: float | None = None


@dataclass
class LinearProgram:
    """Dense maximization LP: max c.x + offset s.t. A x (rel) b, lo <= x <= up.

    Lower bounds must be finite; upper bounds may be +inf.
    """

    c: np.ndarray
    A: np.ndarray
    relations: list[Relation]
    b: np.ndarray
    lo: np.ndarray
    up: np.ndarray
    offset: float = 0.0
    names: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.c = np.asarray(self.c, dtype=np.float64)
        self.A = np.asarray(self.A, dtype=np.float64)
        if self.A.ndim != 2:
            self.A = self.A.reshape(-1, self.c.shape[0])
        self.b = np.asarray(self.b, dtype=np.float64)
        self.lo = np.asarray(self.lo, dtype=np.float64)
        self.up = np.asarray(self.up, dtype=np.float64)
        m, n = self.A.shape
        if self.c.shape != (n,) or self.b.shape != (m,):
            raise ValueError(
                f"dimension mismatch: A is {m}x{n}, c has {self.c.shape}, b has {self.b.shape}"
            )
        if len(self.relations) != m:
            raise ValueError(f"expected {m} relations, got {len(self.relations)}")
        if self.lo.shape != (n,) or self.up.shape != (n,):
            raise ValueError("bound arrays must match variable count")
        if not np.all(np.isfinite(self.c)) or not np.all(np.isfinite(self.A)):
            raise ValueError("objective/constraint coefficients must be finite")
        if not np.all(np.isfinite(self.b)):
            raise ValueError("right-hand sides must be finite")
        if not np.all(np.isfinite(self.lo)):
            raise ValueError("lower bounds must be finite")
        if np.any(self.lo > self.up + 1e-12):
            bad = int(np.argmax(self.lo - self.up))
            raise ValueError(f"variable {bad}: lower bound exceeds upper bound")
        if not self.names:
            self.names = [f"x{j}" for j in range(n)]
        elif len(self.names) != n:
            raise ValueError("names must match variable count")

    @property
    def n_vars(self) -> int:
        return self.A.shape[1]

    @property
    def n_rows(self) -> int:
        return self.A.shape[0]


@dataclass
class MixedIntegerProgram:
    """An LP plus the index set of binary variables."""

    lp: LinearProgram
    binaries: list[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.binaries = sorted(set(int(j) for j in self.binaries))
        for j in self.binaries:
            if not 0 <= j < self.lp.n_vars:
                raise ValueError(f"binary index {j} out of range")
            if self.lp.lo[j] < -1e-12 or self.lp.up[j] > 1.0 + 1e-12:
                raise ValueError(f"binary variable {j} must have bounds within [0, 1]")


@dataclass
class Solution:
    status: Status
    objective: float = float("nan")
    values: np.ndarray | None = None
    best_bound: float = float("nan")
    node_count: int = 0
    iterations: int = 0
    max_residual: float = 0.0

    @property
    def ok(self) -> bool:
        return self.status in (Status.OPTIMAL, Status.INCUMBENT_AT_LIMIT)

    def value_map(self, names: list[str]) -> dict[str, float]:
        if self.values is None:
            return {}
        return {name: float(v) for name, v in zip(names, self.values)}
