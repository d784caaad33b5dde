"""Decision-theoretic evaluation of strategy/scenario outcome matrices.

Hurwicz envelopes with exact breakpoint computation, Laplace/Wald/Savage
criteria, pairwise regret tables, and penalty adjustment.  On integer
currency inputs everything runs in exact rational arithmetic; floating
inputs fall back to a 1e-9 relative tolerance for coincident lines.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from numbers import Rational


class Orientation(Enum):
    GAIN_HIGHER_BETTER = "gains"
    COST_LOWER_BETTER = "costs"


class OrientationError(ValueError):
    """Operation applied to a matrix with the wrong orientation."""


Number = Fraction | float


def _to_number(x) -> Number:
    if isinstance(x, bool):
        raise TypeError("boolean is not a currency value")
    if isinstance(x, Rational):
        return Fraction(x)
    f = float(x)
    if f.is_integer():
        return Fraction(int(f))
    return f


def _tol(values) -> float:
    scale = max((abs(float(v)) for v in values), default=1.0)
    return 1e-9 * max(1.0, scale)


@dataclass(frozen=True)
class OutcomeMatrix:
    """Complete strategies x scenarios outcome values."""

    orientation: Orientation
    strategies: tuple[str, ...]
    scenarios: tuple[str, ...]
    values: tuple[tuple[Number, ...], ...]  # [strategy][scenario]

    @classmethod
    def build(cls, orientation, strategies, scenarios, cells) -> "OutcomeMatrix":
        """cells: dict[(strategy, scenario)] -> value; must be complete."""
        strategies = tuple(strategies)
        scenarios = tuple(scenarios)
        missing = [
            (s, sc) for s in strategies for sc in scenarios if (s, sc) not in cells
        ]
        if missing:
            raise ValueError(f"missing outcome cells: {missing[:6]}")
        rows = tuple(
            tuple(_to_number(cells[(s, sc)]) for sc in scenarios) for s in strategies
        )
        return cls(orientation=orientation, strategies=strategies, scenarios=scenarios, values=rows)

    def __post_init__(self) -> None:
        if not self.strategies or not self.scenarios:
            raise ValueError("need at least one strategy and one scenario")
        if len(set(self.strategies)) != len(self.strategies):
            raise ValueError("duplicate strategy labels")
        if len(self.values) != len(self.strategies) or any(
            len(r) != len(self.scenarios) for r in self.values
        ):
            raise ValueError("value grid does not match labels")

    def row(self, strategy: str) -> tuple[Number, ...]:
        return self.values[self.strategies.index(strategy)]

    def value(self, strategy: str, scenario: str) -> Number:
        return self.row(strategy)[self.scenarios.index(scenario)]

    @property
    def gains(self) -> bool:
        return self.orientation is Orientation.GAIN_HIGHER_BETTER

    def worst(self, strategy: str) -> Number:
        r = self.row(strategy)
        return min(r) if self.gains else max(r)

    def best(self, strategy: str) -> Number:
        r = self.row(strategy)
        return max(r) if self.gains else min(r)

    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for row in self.values for v in row)


def _better(orientation: Orientation):
    return (lambda a, b: a > b) if orientation is Orientation.GAIN_HIGHER_BETTER else (
        lambda a, b: a < b
    )


def _argbest(orientation, labels, values, tol=0.0):
    """Tie-aware best set: labels within tol of the best, label-sorted so
    ties break reproducibly."""
    better = _better(orientation)
    best = values[0]
    for v in values[1:]:
        if better(v, best):
            best = v
    winners = sorted(
        lab
        for lab, v in zip(labels, values)
        if v == best or abs(float(v) - float(best)) <= tol
    )
    return winners, best


@dataclass(frozen=True)
class CriterionResult:
    criterion: str
    values: dict[str, Number]
    winners: tuple[str, ...]  # tie set, matrix order

    @property
    def winner(self) -> str:
        return self.winners[0]

    def as_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "values": {k: _json_number(v) for k, v in self.values.items()},
            "winners": list(self.winners),
            "winner": self.winner,
        }


def hurwicz(outcomes: OutcomeMatrix, strategy: str, alpha) -> Number:
    """Optimism-weighted blend: (1-alpha)*worst + alpha*best."""
    alpha = _to_number(alpha)
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    return (1 - alpha) * outcomes.worst(strategy) + alpha * outcomes.best(strategy)


def wald(outcomes: OutcomeMatrix) -> CriterionResult:
    """Pessimistic criterion: best worst-case value."""
    values = {s: outcomes.worst(s) for s in outcomes.strategies}
    tol = 0.0 if outcomes.exact() else _tol(values.values())
    winners, _ = _argbest(outcomes.orientation, outcomes.strategies, list(values.values()), tol)
    return CriterionResult("wald", values, tuple(winners))


def laplace(outcomes: OutcomeMatrix) -> CriterionResult:
    """Mean-value criterion."""
    n = len(outcomes.scenarios)
    values = {}
    for s in outcomes.strategies:
        total = sum(outcomes.row(s))
        values[s] = total / n if isinstance(total, Fraction) else total / float(n)
    tol = 0.0 if outcomes.exact() else _tol(values.values())
    winners, _ = _argbest(outcomes.orientation, outcomes.strategies, list(values.values()), tol)
    return CriterionResult("laplace", values, tuple(winners))


def _regret(outcomes: OutcomeMatrix, strategy: str, scenario_idx: int, best: Number) -> Number:
    v = outcomes.values[outcomes.strategies.index(strategy)][scenario_idx]
    return (best - v) if outcomes.gains else (v - best)


def savage(outcomes: OutcomeMatrix) -> CriterionResult:
    """Min-max-regret criterion; regret is measured against the best
    strategy of each scenario."""
    per_scenario_best = []
    for k in range(len(outcomes.scenarios)):
        col = [row[k] for row in outcomes.values]
        per_scenario_best.append(max(col) if outcomes.gains else min(col))
    values = {}
    for s in outcomes.strategies:
        values[s] = max(
            _regret(outcomes, s, k, per_scenario_best[k]) for k in range(len(outcomes.scenarios))
        )
    # max regret is minimized regardless of orientation
    tol = 0.0 if outcomes.exact() else _tol(values.values())
    winners, _ = _argbest(
        Orientation.COST_LOWER_BETTER, outcomes.strategies, list(values.values()), tol
    )
    return CriterionResult("savage", values, tuple(winners))


@dataclass(frozen=True)
class RegretTable:
    """Pairwise (min, max) regrets: cell (reference, used) holds the regret
    range of using `used` instead of `reference`; skew-symmetric."""

    strategies: tuple[str, ...]
    cells: dict[tuple[str, str], tuple[Number, Number]]

    def cell(self, reference: str, used: str) -> tuple[Number, Number]:
        return self.cells[(reference, used)]

    def as_dict(self) -> dict:
        return {
            "strategies": list(self.strategies),
            "cells": [
                {
                    "reference": ref,
                    "used": used,
                    "min": _json_number(lo),
                    "max": _json_number(hi),
                }
                for (ref, used), (lo, hi) in sorted(self.cells.items())
            ],
        }


def regret_table(outcomes: OutcomeMatrix) -> RegretTable:
    if len(outcomes.strategies) < 2:
        raise ValueError("regret table needs at least two strategies")
    cells = {}
    for ref in outcomes.strategies:
        ref_row = outcomes.row(ref)
        for used in outcomes.strategies:
            used_row = outcomes.row(used)
            if outcomes.gains:
                deltas = [a - b for a, b in zip(ref_row, used_row)]
            else:
                deltas = [b - a for a, b in zip(ref_row, used_row)]
            cells[(ref, used)] = (min(deltas), max(deltas))
    return RegretTable(strategies=outcomes.strategies, cells=cells)


def apply_penalties(outcomes: OutcomeMatrix, penalties: dict[str, float]) -> OutcomeMatrix:
    """Add a per-strategy penalty to every cell of that strategy's row
    (cost matrices only)."""
    if outcomes.orientation is not Orientation.COST_LOWER_BETTER:
        raise OrientationError("penalties apply to cost-oriented matrices only")
    unknown = set(penalties) - set(outcomes.strategies)
    if unknown:
        raise ValueError(f"penalties for unknown strategies: {sorted(unknown)}")
    rows = []
    for s, row in zip(outcomes.strategies, outcomes.values):
        p = _to_number(penalties.get(s, 0))
        rows.append(tuple(v + p for v in row))
    return OutcomeMatrix(
        orientation=outcomes.orientation,
        strategies=outcomes.strategies,
        scenarios=outcomes.scenarios,
        values=tuple(rows),
    )


@dataclass(frozen=True)
class AlphaInterval:
    lo: Number
    hi: Number
    winners: tuple[str, ...]  # tie set over the open interval

    @property
    def recommended(self) -> str:
        return self.winners[0]


@dataclass(frozen=True)
class RiskDiagram:
    """Hurwicz best-response envelope over the optimism axis, annotated
    with the other criteria."""

    orientation: Orientation
    stats: dict[str, tuple[Number, Number]]  # strategy -> (worst, best)
    intervals: tuple[AlphaInterval, ...]
    breakpoints: tuple[Number, ...]
    annotations: dict[str, CriterionResult]

    def recommended_at(self, alpha) -> str:
        """Winner at a given alpha; exact breakpoints belong to the left
        interval."""
        alpha = _to_number(alpha)
        for iv in self.intervals:
            if alpha <= iv.hi:
                return iv.recommended
        return self.intervals[-1].recommended

    def as_dict(self) -> dict:
        return {
            "orientation": self.orientation.value,
            "strategies": [
                {
                    "strategy": s,
                    "worst": _json_number(w),
                    "best": _json_number(b),
                }
                for s, (w, b) in self.stats.items()
            ],
            "intervals": [
                {
                    "lo": float(iv.lo),
                    "hi": float(iv.hi),
                    "winners": list(iv.winners),
                    "recommended": iv.recommended,
                }
                for iv in self.intervals
            ],
            "breakpoints": [
                {"alpha": float(a), "exact": _exact_str(a)} for a in self.breakpoints
            ],
            "criteria": {name: res.as_dict() for name, res in self.annotations.items()},
        }


def _exact_str(a: Number) -> str | None:
    if isinstance(a, Fraction):
        return f"{a.numerator}/{a.denominator}"
    return None


def _json_number(v: Number):
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else float(v)
    return float(v)


def breakpoints(outcomes: OutcomeMatrix) -> RiskDiagram:
    """Best-response envelope of the per-strategy Hurwicz lines over [0, 1].

    Pairwise line intersections give candidate alphas; winners are read off
    each interval (ties kept as tie sets, first label recommended).  The
    published breakpoints are exactly the alphas where the recommendation
    changes.
    """
    if len(outcomes.strategies) < 2:
        raise ValueError("envelope needs at least two strategies")
    exact = outcomes.exact()
    stats = {s: (outcomes.worst(s), outcomes.best(s)) for s in outcomes.strategies}
    lines = {s: (w, b - w) for s, (w, b) in stats.items()}  # value = w + slope*alpha

    flat = [v for w, sl in lines.values() for v in (w, sl)]
    tol = 0.0 if exact else _tol(flat)

    one = Fraction(1) if exact else 1.0
    zero = Fraction(0) if exact else 0.0
    candidates = {zero, one}
    labels = list(outcomes.strategies)
    for i, a in enumerate(labels):
        wa, sa = lines[a]
        for b in labels[i + 1 :]:
            wb, sb = lines[b]
            denom = sa - sb
            if exact:
                if denom == 0:
                    continue
                alpha = Fraction(wb - wa, denom)
            else:
                if abs(denom) <= tol:
                    continue
                alpha = (wb - wa) / denom
            if zero < alpha < one:
                candidates.add(alpha)
    cuts = sorted(candidates)

    def winners_on(lo: Number, hi: Number) -> tuple[str, ...]:
        mid = (lo + hi) / 2
        vals = [lines[s][0] + lines[s][1] * mid for s in labels]
        won, _ = _argbest(outcomes.orientation, labels, vals, tol)
        return tuple(won)

    merged: list[AlphaInterval] = []
    for lo, hi in zip(cuts, cuts[1:]):
        winners = winners_on(lo, hi)
        if merged and merged[-1].winners == winners:
            merged[-1] = AlphaInterval(merged[-1].lo, hi, winners)
        else:
            merged.append(AlphaInterval(lo, hi, winners))

    bps = tuple(iv.lo for iv in merged[1:])
    annotations = {
        "laplace": laplace(outcomes),
        "wald": wald(outcomes),
        "savage": savage(outcomes),
    }
    return RiskDiagram(
        orientation=outcomes.orientation,
        stats=stats,
        intervals=tuple(merged),
        breakpoints=bps,
        annotations=annotations,
    )
