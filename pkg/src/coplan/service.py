"""HTTP/JSON API powering the cooperative dashboard.

Serves experiment results, risk evaluations (re-aggregated on the fly for
penalty what-ifs) and decision records from an append-only results store;
inventory-cap what-ifs spawn a derived experiment in the background.
"""

from __future__ import annotations

import json
import threading
import time
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, Field

from coplan import __version__
from coplan.config import apply_overrides, config_hash
from coplan.experiment import (
    ExperimentError,
    ExperimentResult,
    run_cell,
    expand,
    load_result_rows,
    persist,
    to_outcomes,
)
from coplan.risk import OrientationError, breakpoints, regret_table


def _not_found(code: str, detail: str):
    return HTTPException(status_code=404, detail={"code": code, "message": detail})


def _unprocessable(errors: list[str]):
    return HTTPException(status_code=422, detail={"code": "invalid_request", "errors": errors})


class ResultStore:
    """Append-only directory store: runs/<id>/{meta.json,results.csv,...}."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.runs_dir = self.root / "runs"
        self.runs_dir.mkdir(parents=True, exist_ok=True)
        self._write_lock = threading.Lock()
        self._threads: list[threading.Thread] = []

    def run_dir(self, run_id: str) -> Path:
        return self.runs_dir / run_id

    def exists(self, run_id: str) -> bool:
        return (self.run_dir(run_id) / "meta.json").is_file()

    def meta(self, run_id: str) -> dict:
        if not self.exists(run_id):
            raise _not_found("experiment_not_found", f"no experiment {run_id!r}")
        meta = json.loads((self.run_dir(run_id) / "meta.json").read_text())
        progress = self.run_dir(run_id) / "progress.json"
        if progress.is_file():
            meta["progress"] = json.loads(progress.read_text())
        return meta

    def list_runs(self) -> list[dict]:
        out = []
        for path in sorted(self.runs_dir.iterdir()) if self.runs_dir.is_dir() else []:
            if (path / "meta.json").is_file():
                out.append(self.meta(path.name))
        out.sort(key=lambda m: (m.get("created_at") or 0, m["run_id"]))
        return out

    def rows(self, run_id: str) -> list[dict]:
        if not self.exists(run_id):
            raise _not_found("experiment_not_found", f"no experiment {run_id!r}")
        path = self.run_dir(run_id) / "results.csv"
        if not path.is_file():
            raise _not_found("results_not_found", f"experiment {run_id!r} has no results")
        return load_result_rows(path)

    def trace_text(self, run_id: str, scenario: str) -> str:
        if not self.exists(run_id):
            raise _not_found("experiment_not_found", f"no experiment {run_id!r}")
        path = self.run_dir(run_id) / "traces" / f"{scenario}.jsonl"
        if not path.is_file():
            raise _not_found("trace_not_found", f"no trace for scenario {scenario!r}")
        return path.read_text()

    def config(self, run_id: str) -> dict:
        import yaml

        path = self.run_dir(run_id) / "config.yaml"
        if not path.is_file():
            raise _not_found("config_not_found", f"experiment {run_id!r} has no config")
        return yaml.safe_load(path.read_text())

    def import_results(self, csv_path: str | Path, run_id: str) -> dict:
        rows = load_result_rows(csv_path)  # validates schema
        run_dir = self.run_dir(run_id)
        run_dir.mkdir(parents=True, exist_ok=True)
        (run_dir / "results.csv").write_text(Path(csv_path).read_text())
        meta = {
            "run_id": run_id,
            "config_hash": run_id,
            "status": "complete",
            "n_rows": len(rows),
            "n_failed": 0,
            "errors": {},
            "parent": None,
            "delta": {},
            "code_version": __version__,
            "created_at": time.time(),
            "source": "import",
        }
        (run_dir / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True))
        if not (run_dir / "decisions.json").exists():
            (run_dir / "decisions.json").write_text("[]")
        return meta

    # -- risk -------------------------------------------------------------

    def risk_payload(self, run_id: str, actor: str, penalties: dict[str, float]) -> dict:
        meta = self.meta(run_id)
        if meta.get("status") != "complete":
            raise HTTPException(
                status_code=409,
                detail={"code": "experiment_incomplete", "status": meta.get("status")},
            )
        rows = self.rows(run_id)
        try:
            matrix = to_outcomes(rows, actor, penalties or None)
            diagram = breakpoints(matrix)
            table = regret_table(matrix)
        except (ExperimentError, OrientationError, ValueError) as err:
            raise _unprocessable([str(err)])
        return {
            "experiment": run_id,
            "actor": actor,
            "penalties": penalties,
            "diagram": diagram.as_dict(),
            "regret_table": table.as_dict(),
        }

    # -- decisions ----------------------------------------------------------

    def decisions(self, run_id: str) -> list[dict]:
        if not self.exists(run_id):
            raise _not_found("experiment_not_found", f"no experiment {run_id!r}")
        path = self.run_dir(run_id) / "decisions.json"
        return json.loads(path.read_text()) if path.is_file() else []

    def record_decision(self, run_id: str, supplier_strategy: str, visibility: str, author: str) -> dict:
        rows = self.rows(run_id)
        strategies = {r["strategy"] for r in rows}
        visibilities = {r["visibility"] for r in rows}
        errors = []
        if supplier_strategy not in strategies:
            errors.append(
                f"unknown supplier strategy {supplier_strategy!r} (have {sorted(strategies)})"
            )
        if visibility not in visibilities:
            errors.append(f"unknown visibility {visibility!r} (have {sorted(visibilities)})")
        if errors:
            raise _unprocessable(errors)
        record = {
            "supplier_strategy": supplier_strategy,
            "visibility": visibility,
            "author": author,
            "recorded_at": time.time(),
        }
        with self._write_lock:
            history = self.decisions(run_id)
            history.append(record)
            (self.run_dir(run_id) / "decisions.json").write_text(
                json.dumps(history, indent=2)
            )
        return record

    # -- derived runs -------------------------------------------------------

    def create_derived(self, parent_id: str, inventory_cap: float) -> dict:
        if not (self.run_dir(parent_id) / "config.yaml").is_file():
            raise _unprocessable(
                [f"experiment {parent_id!r} was imported without a config and cannot be re-simulated"]
            )
        parent_cfg = self.config(parent_id)
        cfg = apply_overrides(parent_cfg, {"run.inventory_cap": str(inventory_cap)})
        run_id = config_hash(cfg)
        if self.exists(run_id):
            return self.meta(run_id)
        run_dir = self.run_dir(run_id)
        run_dir.mkdir(parents=True, exist_ok=True)
        delta = {"run.inventory_cap": inventory_cap}
        meta = {
            "run_id": run_id,
            "config_hash": run_id,
            "status": "running",
            "n_rows": len(expand(cfg)),
            "n_failed": 0,
            "errors": {},
            "parent": parent_id,
            "delta": delta,
            "code_version": __version__,
            "created_at": time.time(),
            "source": "simulation",
        }
        (run_dir / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True))

        def work():
            cells = expand(cfg)
            rows = []
            for k, cell in enumerate(cells):
                rows.append(run_cell(cfg, cell))
                (run_dir / "progress.json").write_text(
                    json.dumps({"done": k + 1, "total": len(cells)})
                )
            result = ExperimentResult(config=cfg, rows=rows, created_at=meta["created_at"])
            persist(result, self.root, parent=parent_id, delta=delta)

        thread = threading.Thread(target=work, daemon=True)
        thread.start()
        self._threads.append(thread)
        return meta

    def wait_for_background(self, timeout: float | None = None) -> None:
        for thread in self._threads:
            thread.join(timeout)


class WhatIfRequest(BaseModel):
    base: str
    penalties: dict[str, float] = Field(default_factory=dict)
    inventory_cap: float | None = None
    supplier_strategy: str | None = None
    visibility: str | None = None


class DecisionRequest(BaseModel):
    supplier_strategy: str
    visibility: str
    author: str = "anonymous"


def _parse_penalties(raw: str | None) -> dict[str, float]:
    if not raw:
        return {}
    out: dict[str, float] = {}
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        for sep in (":", "="):
            if sep in part:
                key, value = part.split(sep, 1)
                break
        else:
            raise _unprocessable([f"bad penalty entry {part!r} (want LABEL:VALUE)"])
        try:
            out[key.strip().upper()] = float(value)
        except ValueError:
            raise _unprocessable([f"bad penalty value {value!r} for {key!r}"])
    if any(v < 0 for v in out.values()):
        raise _unprocessable(["penalties must be nonnegative"])
    return out


def create_app(store_root: str | Path) -> FastAPI:
    store = ResultStore(store_root)
    app = FastAPI(title="coplan service", version=__version__)
    app.state.store = store
    # the dashboard is static files on another origin/port
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.get("/experiments")
    def experiments():
        return {"experiments": store.list_runs()}

    @app.get("/experiments/{run_id}")
    def experiment(run_id: str):
        return store.meta(run_id)

    @app.get("/experiments/{run_id}/results")
    def results(run_id: str):
        rows = [
            {k: (int(v) if isinstance(v, float) and v.is_integer() else v) for k, v in row.items()}
            for row in store.rows(run_id)
        ]
        return {"experiment": run_id, "rows": rows}

    @app.get("/experiments/{run_id}/traces/{scenario}")
    def trace(run_id: str, scenario: str):
        return PlainTextResponse(store.trace_text(run_id, scenario))

    @app.get("/experiments/{run_id}/risk")
    def risk(
        run_id: str,
        actor: str = Query("supplier"),
        penalties: str | None = Query(None),
    ):
        if actor not in ("supplier", "customer"):
            raise _unprocessable([f"unknown actor {actor!r}"])
        pen = _parse_penalties(penalties)
        if pen and actor != "customer":
            raise _unprocessable(["penalties apply to the customer side only"])
        return store.risk_payload(run_id, actor, pen)

    @app.post("/whatif")
    def whatif(request: WhatIfRequest):
        if not store.exists(request.base):
            raise _not_found("experiment_not_found", f"no experiment {request.base!r}")
        errors = []
        if request.inventory_cap is not None and request.inventory_cap < 0:
            errors.append("inventory_cap must be nonnegative")
        if any(v < 0 for v in request.penalties.values()):
            errors.append("penalties must be nonnegative")
        if errors:
            raise _unprocessable(errors)
        if request.inventory_cap is not None:
            meta = store.create_derived(request.base, request.inventory_cap)
            return {
                "experiment": meta["run_id"],
                "status": meta["status"],
                "parent": meta.get("parent") or request.base,
                "delta": meta.get("delta", {}),
            }
        penalties = {k.upper(): v for k, v in request.penalties.items()}
        return {
            "experiment": None,  # penalties-only: no new run created
            "base": request.base,
            "supplier": store.risk_payload(request.base, "supplier", {}),
            "customer": store.risk_payload(request.base, "customer", penalties),
        }

    @app.post("/experiments/{run_id}/decision")
    def record_decision(run_id: str, request: DecisionRequest):
        return store.record_decision(
            run_id, request.supplier_strategy, request.visibility, request.author
        )

    @app.get("/experiments/{run_id}/decision")
    def decisions(run_id: str):
        return {"experiment": run_id, "decisions": store.decisions(run_id)}

    return app
