"""Customer demand model and supplier-side demand resolution.

The customer communicates a rolling demand plan: firm quantities over a
leading firm horizon, and (lower, upper) flexibility intervals over the
remaining flexible horizon.  Between planning steps, firm values never
change, intervals never change while they stay flexible, and intervals
entering the firm horizon consolidate to a single value inside the
interval.  The supplier resolves the intervals into deterministic demand
with a bound-picking strategy before planning.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class Consolidation(Enum):
    """Customer rule turning an interval into a firm value.

    MIN means the customer had overestimated and finally orders the lower
    bound; MAX the opposite.
    """

    MIN = "Min"
    MAX = "Max"


class FlexResolution(Enum):
    """Supplier rule resolving an interval into deterministic demand."""

    MAX_BOUND = "max"
    MIN_BOUND = "min"


class DomainError(ValueError):
    """Period outside the trend's padded domain."""


@dataclass(frozen=True)
class FlexInterval:
    lower: float
    upper: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.lower <= self.upper:
            raise ValueError(f"invalid interval [{self.lower}, {self.upper}]")

    def pick(self, g: Consolidation) -> float:
        return self.lower if g is Consolidation.MIN else self.upper

    def resolve(self, f: FlexResolution) -> float:
        return self.upper if f is FlexResolution.MAX_BOUND else self.lower


@dataclass(frozen=True)
class TrendSpec:
    """Deterministic demand trend with a peak window and a flexibility band.

    ``peak_profile[k]`` replaces the baseline at period ``peak_start + k``
    (half-open window).  Periods after ``length`` repeat the baseline so
    late planning steps still see a full horizon.  ``flex_mode`` is
    ``ratio`` (band = nominal * (1 +- flexibility)) or ``units``
    (band = nominal +- flexibility, clamped at zero).
    """

    product: str
    baseline: float
    length: int
    peak_start: int = 0
    peak_profile: tuple[float, ...] = ()
    flexibility: float = 0.2
    flex_mode: str = "ratio"

    def __post_init__(self) -> None:
        object.__setattr__(self, "peak_profile", tuple(float(v) for v in self.peak_profile))
        if self.baseline < 0 or any(v < 0 for v in self.peak_profile):
            raise ValueError("quantities must be nonnegative")
        if self.flexibility < 0:
            raise ValueError("flexibility must be nonnegative")
        if self.length < 1:
            raise ValueError("simulation length must be positive")
        if self.flex_mode not in ("ratio", "units"):
            raise ValueError(f"unknown flex_mode {self.flex_mode!r}")
        if self.peak_profile:
            end = self.peak_start + len(self.peak_profile)
            if not (1 <= self.peak_start and end <= self.length + 1):
                raise ValueError("peak window must lie within the simulation horizon")

    @property
    def peak_end(self) -> int:
        return self.peak_start + len(self.peak_profile)

    def nominal(self, t: int) -> float:
        """Total deterministic demand at period t (padded past `length`)."""
        if t < 1:
            raise DomainError(f"period {t} precedes the demand horizon")
        if self.peak_profile and self.peak_start <= t < self.peak_end:
            return self.peak_profile[t - self.peak_start]
        return self.baseline


def flexible_bounds(trend: TrendSpec, t: int) -> FlexInterval:
    """Flexibility interval around the trend at period t."""
    nominal = trend.nominal(t)
    if trend.flex_mode == "ratio":
        lo = nominal * (1.0 - trend.flexibility)
        hi = nominal * (1.0 + trend.flexibility)
    else:
        lo = nominal - trend.flexibility
        hi = nominal + trend.flexibility
    return FlexInterval(max(0.0, lo), max(0.0, hi))


@dataclass(frozen=True)
class CustomerConfig:
    """Horizon lengths of the customer's communication process."""

    firm_len: int  # firm horizon length (the "visibility" granted)
    horizon: int  # planning horizon communicated each step
    period: int  # replanning periodicity
    mode: Consolidation = Consolidation.MIN

    def __post_init__(self) -> None:
        if not 0 < self.firm_len < self.horizon:
            raise ValueError("need 0 < firm_len < horizon")
        if not 0 < self.period <= self.firm_len:
            raise ValueError("need 0 < period <= firm_len (every period firm before execution)")


@dataclass(frozen=True)
class DemandPlan:
    """Demand communicated at one planning step.

    firm covers [step, step + firm_len - 1]; flexible covers the rest of
    [step, step + horizon - 1].
    """

    step: int
    firm: dict[int, float] = field(default_factory=dict)
    flexible: dict[int, FlexInterval] = field(default_factory=dict)

    def __post_init__(self) -> None:
        overlap = set(self.firm) & set(self.flexible)
        if overlap:
            raise ValueError(f"periods both firm and flexible: {sorted(overlap)}")
        periods = sorted(self.firm) + sorted(self.flexible)
        if periods and periods != list(range(periods[0], periods[-1] + 1)):
            raise ValueError("firm+flexible must cover a contiguous period range")

    @property
    def horizon_periods(self) -> list[int]:
        return sorted(set(self.firm) | set(self.flexible))


def consolidate(g: Consolidation, interval: FlexInterval) -> float:
    """Firm value for an interval entering the firm horizon."""
    return interval.pick(g)


def init_demand(trend: TrendSpec, cfg: CustomerConfig, step: int) -> DemandPlan:
    """First communicated plan: intervals everywhere, then the leading
    firm horizon consolidated."""
    if step < 1:
        raise DomainError(f"planning step {step} precedes the horizon")
    firm: dict[int, float] = {}
    flexible: dict[int, FlexInterval] = {}
    for t in range(step, step + cfg.horizon):
        iv = flexible_bounds(trend, t)
        if t < step + cfg.firm_len:
            firm[t] = consolidate(cfg.mode, iv)
        else:
            flexible[t] = iv
    return DemandPlan(step=step, firm=firm, flexible=flexible)


def roll_demand(prev: DemandPlan, trend: TrendSpec, cfg: CustomerConfig) -> DemandPlan:
    """Advance the plan by one replanning period.

    Firm values in both firm horizons carry over unchanged; flexible
    periods entering the firm horizon consolidate from their previous
    interval; intervals staying flexible carry over unchanged; periods
    newly entering the horizon get fresh intervals from the trend.
    """
    step = prev.step + cfg.period
    firm: dict[int, float] = {}
    flexible: dict[int, FlexInterval] = {}
    firm_end = step + cfg.firm_len  # exclusive
    for t in range(step, step + cfg.horizon):
        if t in prev.firm:
            if t < firm_end:
                firm[t] = prev.firm[t]
            else:  # cannot happen: firm horizons only advance
                raise AssertionError("firm period left the firm horizon")
        elif t in prev.flexible:
            if t < firm_end:
                firm[t] = consolidate(cfg.mode, prev.flexible[t])
            else:
                flexible[t] = prev.flexible[t]
        else:
            iv = flexible_bounds(trend, t)
            if t < firm_end:
                firm[t] = consolidate(cfg.mode, iv)
            else:
                flexible[t] = iv
    return DemandPlan(step=step, firm=firm, flexible=flexible)


def resolve_deterministic(plan: DemandPlan, f: FlexResolution) -> dict[int, float]:
    """Deterministic demand fed to the planner: identity on firm periods,
    bound choice on flexible ones."""
    out = dict(plan.firm)
    for t, iv in plan.flexible.items():
        out[t] = iv.resolve(f)
    return dict(sorted(out.items()))
