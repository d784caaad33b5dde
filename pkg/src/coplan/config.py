"""Experiment configuration document: loading, overrides, hashing, and
construction of the runtime objects (trends, planning parameters,
scenario specs)."""

from __future__ import annotations

import hashlib
import json
from importlib import resources

import yaml

from coplan.demand import Consolidation, CustomerConfig, TrendSpec
from coplan.planner import (
    ComponentSpec,
    PlanningParameters,
    ProductSpec,
    SupplierSpec,
    WorkforceAction,
)
from coplan.simulator import ScenarioSpec, warm_start
from coplan.solver import SolveLimits


class ConfigError(ValueError):
    pass


def default_config() -> dict:
    text = resources.files("coplan.data").joinpath("default_config.yaml").read_text()
    return yaml.safe_load(text)


def load_config(path: str | None = None) -> dict:
    if path is None:
        return default_config()
    try:
        with open(path) as fh:
            cfg = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except yaml.YAMLError as err:
        raise ConfigError(f"config parse error in {path}: {err}")
    if not isinstance(cfg, dict):
        raise ConfigError(f"config root must be a mapping: {path}")
    return cfg


def apply_overrides(cfg: dict, overrides: dict[str, str]) -> dict:
    """Apply dotted-path overrides; unknown paths are errors."""
    out = json.loads(json.dumps(cfg))  # deep copy
    for dotted, raw in overrides.items():
        node = out
        parts = dotted.split(".")
        for part in parts[:-1]:
            if not isinstance(node, dict) or part not in node:
                raise ConfigError(f"unknown config path: {dotted}")
            node = node[part]
        leaf = parts[-1]
        if not isinstance(node, dict) or leaf not in node:
            raise ConfigError(f"unknown config path: {dotted}")
        node[leaf] = yaml.safe_load(raw) if isinstance(raw, str) else raw
    return out


def config_hash(cfg: dict) -> str:
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def build_trend(cfg: dict, label: str) -> TrendSpec:
    try:
        t = cfg["trends"][label]
    except KeyError:
        raise ConfigError(f"unknown trend {label!r}")
    if "peak_profile" in t:
        profile = tuple(float(v) for v in t["peak_profile"])
        start = int(t.get("peak_start", 1))
    elif "peak_value" in t:
        start = int(t["peak_start"])
        profile = (float(t["peak_value"]),) * (int(t["peak_end"]) - start)
    else:
        start, profile = 0, ()
    return TrendSpec(
        product=str(t.get("product", "P")),
        baseline=float(t["baseline"]),
        length=int(t["length"]),
        peak_start=start,
        peak_profile=profile,
        flexibility=float(t.get("flexibility", 0.2)),
        flex_mode=str(t.get("flex_mode", "ratio")),
    )


def build_parameters(cfg: dict) -> PlanningParameters:
    costs = cfg["costs"]
    temporal = cfg["temporal"]
    capacity = cfg["capacity"]
    components = [
        ComponentSpec(id=cid, holding_cost=float(h))
        for cid, h in costs["component_holding"].items()
    ]
    suppliers = [
        SupplierSpec(
            id=sid,
            costs={c: float(v) for c, v in table.items()},
            anticipation=int(temporal["delay_purchase"][sid]),
        )
        for sid, table in costs["purchase"].items()
    ]
    product_id = next(iter(cfg["trends"].values())).get("product", "P")
    product = ProductSpec(
        id=str(product_id),
        revenue=float(costs["selling_price"]),
        load=float(capacity["unit_load"]),
        production_cost=float(costs["production"]),
        subcontract_cost=float(costs["subcontracting"]),
        holding_cost=float(costs["product_holding"]),
        backorder_cost=float(costs["backorder"]),
    )
    actions = [
        WorkforceAction(
            id=str(a["id"]), overcapacity=float(a["overcapacity"]), cost=float(a["cost"])
        )
        for a in capacity.get("actions", []) or []
    ]
    cap = cfg["run"].get("inventory_cap")
    return PlanningParameters(
        products=[product],
        components=components,
        bom={product.id: {c: float(v) for c, v in cfg["bom"].items()}},
        suppliers=suppliers,
        horizon=int(temporal["planning_horizon"]),
        capacity=float(capacity["nominal"]),
        extra_hours_cost=float(costs["extra_hours"]),
        extra_hours_max=float(capacity["extra_hours_max"]),
        lead_internal=int(temporal["lead_internal"]),
        lead_subcontract=int(temporal["lead_subcontract"]),
        delay_subcontract=int(temporal["delay_subcontract"]),
        delay_extra_hours=int(temporal["delay_extra_hours"]),
        delay_workforce=int(temporal.get("delay_workforce", temporal["delay_extra_hours"])),
        actions=actions,
        inventory_cap=None if cap is None else float(cap),
    )


def build_scenario(
    cfg: dict, trend_label: str, consolidation: str, visibility: str, strategy: str
) -> ScenarioSpec:
    doe = cfg["doe"]
    run = cfg["run"]
    if consolidation not in ("Min", "Max"):
        raise ConfigError(f"unknown consolidation {consolidation!r}")
    if strategy not in ("S1", "S2"):
        raise ConfigError(f"unknown strategy {strategy!r}")
    try:
        firm_len = int(doe["visibilities"][visibility])
    except KeyError:
        raise ConfigError(f"unknown visibility {visibility!r}")
    trend = build_trend(cfg, trend_label)
    params = build_parameters(cfg)
    if not run.get("cold_start", False):
        params = warm_start(params, trend.baseline)
    customer = CustomerConfig(
        firm_len=firm_len,
        horizon=int(cfg["temporal"]["planning_horizon"]),
        period=int(cfg["temporal"]["replanning_period"]),
        mode=Consolidation.MIN if consolidation == "Min" else Consolidation.MAX,
    )
    solver = run.get("solver", {}) or {}
    limits = SolveLimits(
        max_nodes=int(solver.get("max_nodes", 2000)),
        max_seconds=solver.get("max_seconds"),
    )
    return ScenarioSpec(
        trend_label=trend_label,
        consolidation_label=consolidation,
        visibility_label=visibility,
        strategy_label=strategy,
        trend=trend,
        customer=customer,
        params=params,
        simulation_length=int(run["simulation_length"]),
        limits=limits,
    )
