"""Command-line front door: run experiments, evaluate risk, emit report
files, serve the dashboard API, and import fixture results.

Exit codes: 0 success, 1 runtime failure, 2 usage/config error.
"""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

import click

from coplan import __version__
from coplan.config import ConfigError, apply_overrides, load_config
from coplan.experiment import (
    ExperimentError,
    expand,
    import_outcomes,
    persist,
    run,
)
from coplan.risk import OrientationError, breakpoints, regret_table


class CliError(click.ClickException):
    exit_code = 1


def _parse_overrides(pairs: tuple[str, ...]) -> dict[str, str]:
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise click.UsageError(f"override {pair!r} must look like key.path=value")
        key, value = pair.split("=", 1)
        out[key.strip()] = value
    return out


def _parse_penalties(raw: str | None) -> dict[str, float]:
    if not raw:
        return {}
    out = {}
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        for sep in ("=", ":"):
            if sep in part:
                key, value = part.split(sep, 1)
                break
        else:
            raise click.UsageError(f"penalty {part!r} must look like v2=1000")
        try:
            out[key.strip().upper()] = float(value)
        except ValueError:
            raise click.UsageError(f"bad penalty value in {part!r}")
    return out


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Cooperative planning workbench."""


@main.command()
@click.option(
    "--config",
    "config_path",
    envvar="COPLAN_CONFIG",
    type=click.Path(),
    default=None,
    help="Experiment config (YAML); the packaged default when omitted.",
)
@click.option("--set", "overrides", multiple=True, help="Override config values: key.path=value.")
@click.option(
    "--output-dir",
    type=click.Path(file_okay=False),
    default=".",
    show_default=True,
    help="Results root; the run lands in <output-dir>/runs/<config-hash>.",
)
@click.option("--parallelism", type=int, default=None, help="Scenario fan-out (default from config).")
def simulate(config_path, overrides, output_dir, parallelism):
    """Run the design of experiments and persist results + traces."""
    try:
        cfg = load_config(config_path)
        cfg = apply_overrides(cfg, _parse_overrides(overrides))
        cells = expand(cfg)
    except ConfigError as err:
        raise click.UsageError(str(err))
    click.echo(f"running {len(cells)} scenarios...")
    result = run(cfg, parallelism=parallelism)
    run_dir = persist(result, output_dir)
    click.echo(f"results written to {run_dir}")

    header = ["strategy", "trend", "cons.", "vis.", "gain", "costs", "prod", "inv", "back", "purch"]
    click.echo("  ".join(f"{h:>9}" for h in header))
    for row in result.rows:
        if not row.ok:
            click.echo(f"{row.scenario_id}: FAILED ({row.error})")
            continue
        ind = row.indicators
        cells_txt = [
            row.labels["strategy"],
            row.labels["trend"],
            row.labels["consolidation"],
            row.labels["visibility"],
        ] + [
            f"{ind[k]:,.0f}"
            for k in (
                "global_gain",
                "global_costs",
                "production_cost",
                "inventory_cost",
                "backorder_cost",
                "purchasing_cost",
            )
        ]
        click.echo("  ".join(f"{c:>9}" for c in cells_txt))
    failures = [r for r in result.rows if not r.ok]
    if failures:
        raise CliError(f"{len(failures)} scenario(s) failed; partial results retained")


def _results_csv_path(results: str) -> Path:
    path = Path(results)
    if path.is_dir():
        nested = path / "results.csv"
        if nested.is_file():
            return nested
        raise CliError(f"{path} has no results.csv")
    if not path.is_file():
        raise click.UsageError(f"no such results file: {path}")
    return path


@main.command()
@click.argument("results", type=click.Path())
@click.option("--actor", type=click.Choice(["supplier", "customer"]), default="supplier", show_default=True)
@click.option("--penalties", default=None, help="Per-visibility penalties, e.g. v2=1000,v3=2000,v4=5000.")
@click.option("--output-dir", type=click.Path(file_okay=False), default=".", show_default=True)
def evaluate(results, actor, penalties, output_dir):
    """Evaluate risk criteria on a results CSV (or run directory)."""
    penalty_map = _parse_penalties(penalties)
    try:
        matrix = import_outcomes(_results_csv_path(results), actor=actor, penalties=penalty_map or None)
        diagram = breakpoints(matrix)
        table = regret_table(matrix)
    except (ExperimentError, OrientationError, ValueError) as err:
        raise CliError(str(err))

    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    diagram_path = out / f"risk_diagram_{actor}.json"
    table_path = out / f"regret_table_{actor}.json"
    diagram_path.write_text(json.dumps(diagram.as_dict(), indent=2, sort_keys=True))
    table_path.write_text(json.dumps(table.as_dict(), indent=2, sort_keys=True))

    lines = [f"risk evaluation ({actor} side)"]
    for s, (worst, best) in diagram.stats.items():
        lines.append(f"  {s}: worst {float(worst):,.0f}  best {float(best):,.0f}")
    for name, res in diagram.annotations.items():
        lines.append(f"  {name} winner: {', '.join(res.winners)}")
    if diagram.breakpoints:
        alphas = ", ".join(f"{float(a):.4f}" for a in diagram.breakpoints)
        lines.append(f"  hurwicz breakpoints: {alphas}")
        segments = " | ".join(
            f"{iv.recommended} on [{float(iv.lo):.4f}, {float(iv.hi):.4f}]" for iv in diagram.intervals
        )
        lines.append(f"  envelope: {segments}")
    else:
        lines.append(f"  hurwicz breakpoints: none ({diagram.intervals[0].recommended} everywhere)")
    summary = "\n".join(lines)
    (out / f"risk_summary_{actor}.txt").write_text(summary + "\n")
    click.echo(summary)
    click.echo(f"wrote {diagram_path} and {table_path}")


@main.command()
@click.argument("results", type=click.Path())
@click.option("--output-dir", type=click.Path(file_okay=False), default=None,
              help="Defaults to <run-dir>/report.")
def report(results, output_dir):
    """Emit per-scenario cost-breakdown and backorder-series files."""
    run_dir = Path(results)
    if not run_dir.is_dir():
        raise click.UsageError(f"report expects a run directory, got {results!r}")
    details = run_dir / "details.csv"
    series = run_dir / "backorders.csv"
    missing = [str(p) for p in (run_dir / "results.csv", details, series) if not p.is_file()]
    if missing:
        raise CliError("missing inputs: " + ", ".join(missing))

    out = Path(output_dir) if output_dir else run_dir / "report"
    out.mkdir(parents=True, exist_ok=True)

    with open(details, newline="") as fh:
        detail_rows = list(csv.DictReader(fh))
    breakdown = out / "cost_breakdown.csv"
    breakdown.write_text(details.read_text())

    by_scenario: dict[str, list[tuple[int, str]]] = {}
    with open(series, newline="") as fh:
        for row in csv.DictReader(fh):
            by_scenario.setdefault(row["scenario"], []).append((int(row["period"]), row["backorder"]))
    missing_series = [
        r["scenario"] for r in detail_rows if r["status"] == "ok" and r["scenario"] not in by_scenario
    ]
    if missing_series:
        raise CliError("missing backorder series for: " + ", ".join(missing_series))
    for scenario, points in sorted(by_scenario.items()):
        lines = ["period,backorder"] + [f"{t},{v}" for t, v in sorted(points)]
        (out / f"backorders_{scenario}.csv").write_text("\n".join(lines) + "\n")
    click.echo(f"report written to {out} ({len(by_scenario)} series)")


@main.command()
@click.option("--results-dir", type=click.Path(file_okay=False), default=".", show_default=True)
@click.option("--bind", default="127.0.0.1:8000", show_default=True, help="host:port to listen on.")
def serve(results_dir, bind):
    """Serve the dashboard HTTP API until interrupted."""
    import uvicorn

    from coplan.service import create_app

    if not Path(results_dir).is_dir():
        raise click.UsageError(f"no such results directory: {results_dir}")
    host, _, port_txt = bind.partition(":")
    try:
        port = int(port_txt or "8000")
    except ValueError:
        raise click.UsageError(f"bad bind address {bind!r}")
    app = create_app(results_dir)
    try:
        uvicorn.run(app, host=host or "127.0.0.1", port=port, log_level="warning")
    except SystemExit as err:  # uvicorn wraps socket errors in SystemExit
        raise CliError(f"server failed to start on {bind}: {err}")
    except OSError as err:
        raise CliError(f"cannot bind {bind}: {err}")


@main.command("import-results")
@click.argument("csv_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--results-dir", type=click.Path(file_okay=False), default=".", show_default=True)
@click.option("--id", "run_id", required=True, help="Experiment id to register the CSV under.")
def import_results(csv_path, results_dir, run_id):
    """Register an externally produced results CSV as an experiment."""
    from coplan.service import ResultStore

    try:
        meta = ResultStore(results_dir).import_results(csv_path, run_id)
    except ExperimentError as err:
        raise CliError(str(err))
    click.echo(f"imported {csv_path} as experiment {meta['run_id']} ({meta['n_rows']} rows)")


if __name__ == "__main__":
    main()
