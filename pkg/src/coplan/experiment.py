"""Design-of-experiments expansion, scenario execution, result persistence
and outcome-matrix assembly for both actors."""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from coplan import __version__
from coplan.config import ConfigError, build_scenario, config_hash
from coplan.risk import Orientation, OutcomeMatrix, apply_penalties
from coplan.simulator import (
    ScenarioAbort,
    backorder_series,
    run_scenario,
    trace_to_jsonl,
)

RESULT_COLUMNS = [
    "strategy",
    "trend",
    "consolidation",
    "visibility",
    "global_gain",
    "global_costs",
    "production_cost",
    "inventory_cost",
    "backorder_cost",
    "purchasing_cost",
]

DETAIL_COLUMNS = [
    "scenario",
    "revenue",
    "internal_production_cost",
    "subcontracting_cost",
    "extra_hours_cost",
    "workforce_cost",
    "finished_holding_cost",
    "component_holding_cost",
    "status",
    "flagged_steps",
]


class ExperimentError(RuntimeError):
    pass


@dataclass
class ScenarioRow:
    labels: dict[str, str]  # strategy/trend/consolidation/visibility
    ok: bool
    indicators: dict[str, float] = field(default_factory=dict)
    backorders: list[tuple[int, float]] = field(default_factory=list)
    trace_jsonl: str = ""
    flagged_steps: list[int] = field(default_factory=list)
    error: str = ""

    @property
    def scenario_id(self) -> str:
        l = self.labels
        return f"{l['trend']}-{l['consolidation']}-{l['visibility']}-{l['strategy']}"


@dataclass
class ExperimentResult:
    config: dict
    rows: list[ScenarioRow]
    created_at: float = 0.0

    @property
    def run_id(self) -> str:
        return config_hash(self.config)

    @property
    def complete(self) -> bool:
        return all(r.ok for r in self.rows)


def expand(cfg: dict) -> list[tuple[str, str, str, str]]:
    """Cartesian factor expansion in (trend, consolidation, visibility,
    strategy) order."""
    doe = cfg["doe"]
    for factor in ("trends", "consolidations", "visibilities", "strategies"):
        if not doe.get(factor):
            raise ConfigError(f"empty design factor: {factor}")
    return [
        (t, g, v, s)
        for t in doe["trends"]
        for g in doe["consolidations"]
        for v in doe["visibilities"]
        for s in doe["strategies"]
    ]


def run_cell(cfg: dict, cell: tuple[str, str, str, str]) -> ScenarioRow:
    trend, g, vis, strat = cell
    labels = {"strategy": strat, "trend": trend, "consolidation": g, "visibility": vis}
    try:
        spec = build_scenario(cfg, trend, g, vis, strat)
        trace, ind = run_scenario(spec)
    except ScenarioAbort as err:
        return ScenarioRow(labels=labels, ok=False, error=str(err))
    return ScenarioRow(
        labels=labels,
        ok=True,
        indicators=ind.as_dict(),
        backorders=backorder_series(trace),
        trace_jsonl=trace_to_jsonl(trace, ind),
        flagged_steps=list(trace.flagged_steps),
    )


def run(cfg: dict, parallelism: int | None = None) -> ExperimentResult:
    """Run every expanded scenario; the result rows are independent of the
    parallelism degree."""
    cells = expand(cfg)
    if parallelism is None:
        parallelism = int(cfg.get("run", {}).get("parallelism", 1) or 1)
    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            futures = [pool.submit(run_cell, cfg, cell) for cell in cells]
            rows = [f.result() for f in futures]
    else:
        rows = [run_cell(cfg, cell) for cell in cells]
    return ExperimentResult(config=cfg, rows=rows, created_at=time.time())


def _fmt(v: float) -> str:
    if isinstance(v, float) and v.is_integer():
        return str(int(v))
    return repr(v)


def results_csv_text(result: ExperimentResult) -> str:
    lines = [",".join(RESULT_COLUMNS)]
    for row in result.rows:
        if not row.ok:
            continue
        cells = [
            row.labels["strategy"],
            row.labels["trend"],
            row.labels["consolidation"],
            row.labels["visibility"],
        ] + [_fmt(row.indicators[k]) for k in RESULT_COLUMNS[4:]]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def persist(result: ExperimentResult, root: str | Path, parent: str | None = None,
            delta: dict | None = None) -> Path:
    """Write runs/<id>/{config.yaml,meta.json,results.csv,details.csv,traces/}."""
    import yaml

    run_dir = Path(root) / "runs" / result.run_id
    traces = run_dir / "traces"
    traces.mkdir(parents=True, exist_ok=True)
    (run_dir / "config.yaml").write_text(yaml.safe_dump(result.config, sort_keys=True))
    (run_dir / "results.csv").write_text(results_csv_text(result))

    detail_lines = [",".join(DETAIL_COLUMNS)]
    for row in result.rows:
        if row.ok:
            cells = [row.scenario_id] + [
                _fmt(row.indicators[k]) for k in DETAIL_COLUMNS[1:8]
            ] + ["ok", ";".join(map(str, row.flagged_steps))]
        else:
            cells = [row.scenario_id] + ["" for _ in DETAIL_COLUMNS[1:8]] + [
                f"error: {row.error}",
                "",
            ]
        detail_lines.append(",".join(cells))
    (run_dir / "details.csv").write_text("\n".join(detail_lines) + "\n")

    series_rows = ["scenario,period,backorder"]
    for row in result.rows:
        for t, v in row.backorders:
            series_rows.append(f"{row.scenario_id},{t},{_fmt(v)}")
        if row.trace_jsonl:
            (traces / f"{row.scenario_id}.jsonl").write_text(row.trace_jsonl)
    (run_dir / "backorders.csv").write_text("\n".join(series_rows) + "\n")

    meta = {
        "run_id": result.run_id,
        "config_hash": result.run_id,
        "status": "complete" if result.complete else "partial",
        "n_rows": len(result.rows),
        "n_failed": sum(1 for r in result.rows if not r.ok),
        "errors": {r.scenario_id: r.error for r in result.rows if not r.ok},
        "parent": parent,
        "delta": delta or {},
        "code_version": __version__,
        "created_at": result.created_at,
        "source": "simulation",
    }
    (run_dir / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True))
    if not (run_dir / "decisions.json").exists():
        (run_dir / "decisions.json").write_text("[]")
    return run_dir


def load_result_rows(path: str | Path) -> list[dict]:
    """Rows of a results.csv (or a full-schema fixture CSV), typed."""
    path = Path(path)
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(RESULT_COLUMNS) - set(reader.fieldnames or [])
        if missing:
            raise ExperimentError(f"{path}: missing columns {sorted(missing)}")
        for lineno, raw in enumerate(reader, start=2):
            row = {}
            for key in RESULT_COLUMNS:
                value = raw[key]
                if key in RESULT_COLUMNS[:4]:
                    if not value:
                        raise ExperimentError(f"{path}:{lineno}: empty {key}")
                    row[key] = value
                else:
                    try:
                        row[key] = float(value)
                    except ValueError:
                        raise ExperimentError(
                            f"{path}:{lineno}: bad number {value!r} in {key}"
                        )
            rows.append(row)
    return rows


ACTORS = ("supplier", "customer")


def to_outcomes(
    rows: list[dict] | ExperimentResult,
    actor: str,
    penalties: dict[str, float] | None = None,
) -> OutcomeMatrix:
    """Reshape result rows into the actor's outcome matrix.

    supplier: strategies x (trend, consolidation, visibility) global gains;
    customer: visibilities x (trend, consolidation, strategy) backorder
    costs, optionally penalized."""
    if isinstance(rows, ExperimentResult):
        failed = [r.scenario_id for r in rows.rows if not r.ok]
        if failed:
            raise ExperimentError(f"incomplete experiment, missing cells: {failed}")
        rows = [
            {**r.labels, **{k: r.indicators[k] for k in RESULT_COLUMNS[4:]}}
            for r in rows.rows
        ]
    if actor not in ACTORS:
        raise ExperimentError(f"unknown actor {actor!r} (expected supplier|customer)")
    cells = {}
    strategies: list[str] = []
    scenarios: list[str] = []
    for row in rows:
        if actor == "supplier":
            strategy = row["strategy"]
            scenario = f"{row['trend']}-{row['consolidation']}-{row['visibility']}"
            value = row["global_gain"]
        else:
            strategy = row["visibility"]
            scenario = f"{row['trend']}-{row['consolidation']}-{row['strategy']}"
            value = row["backorder_cost"]
        if strategy not in strategies:
            strategies.append(strategy)
        if scenario not in scenarios:
            scenarios.append(scenario)
        cells[(strategy, scenario)] = value
    orientation = (
        Orientation.GAIN_HIGHER_BETTER if actor == "supplier" else Orientation.COST_LOWER_BETTER
    )
    missing = [
        (s, sc) for s in strategies for sc in scenarios if (s, sc) not in cells
    ]
    if missing:
        raise ExperimentError(f"missing outcome cells: {missing}")
    matrix = OutcomeMatrix.build(orientation, sorted(strategies), scenarios, cells)
    if penalties:
        matrix = apply_penalties(matrix, penalties)
    return matrix


def import_outcomes(
    path: str | Path, actor: str = "supplier", penalties: dict[str, float] | None = None
) -> OutcomeMatrix:
    """Build an OutcomeMatrix from a results/fixture CSV.

    Accepts the full result schema or a reduced (strategy, scenario, value)
    file; the reduced form takes its orientation from `actor`."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        if {"strategy", "scenario", "value"} <= set(fields):
            cells = {}
            strategies: list[str] = []
            scenarios: list[str] = []
            for lineno, raw in enumerate(reader, start=2):
                try:
                    value = float(raw["value"])
                except (TypeError, ValueError):
                    raise ExperimentError(f"{path}:{lineno}: bad value {raw.get('value')!r}")
                s, sc = raw["strategy"], raw["scenario"]
                if not s or not sc:
                    raise ExperimentError(f"{path}:{lineno}: empty label")
                if s not in strategies:
                    strategies.append(s)
                if sc not in scenarios:
                    scenarios.append(sc)
                cells[(s, sc)] = value
            orientation = (
                Orientation.GAIN_HIGHER_BETTER
                if actor == "supplier"
                else Orientation.COST_LOWER_BETTER
            )
            matrix = OutcomeMatrix.build(orientation, sorted(strategies), scenarios, cells)
            if penalties:
                matrix = apply_penalties(matrix, penalties)
            return matrix
    return to_outcomes(load_result_rows(path), actor, penalties)


def export_outcomes(matrix: OutcomeMatrix, path: str | Path) -> None:
    """Write a matrix as the reduced (strategy, scenario, value) CSV."""
    lines = ["strategy,scenario,value"]
    for s, row in zip(matrix.strategies, matrix.values):
        for sc, v in zip(matrix.scenarios, row):
            lines.append(f"{s},{sc},{_fmt(float(v))}")
    Path(path).write_text("\n".join(lines) + "\n")
