"""Scenario documents: JSON configuration for a complete run.

A scenario pins everything a run needs: the region, how agents are placed,
sensing and step parameters, the dynamics law with its kernels or field,
targets with demands, and the seed. ``load_scenario`` validates every field
and materializes every default into the returned scenario, so the document
written next to a run's outputs reproduces it exactly.

Example (charge-style target assignment, agents released from the center):

    {
      "region": {"min": [0, 0], "max": [1, 1]},
      "agents": {"mode": "point", "count": 60},
      "sensing_range": 0.25,
      "law": {"kind": "electrostatic"},
      "targets": [{"position": [0.2, 0.8], "demand": 5}],
      "targets_disappear": true,
      "seed": 7
    }
"""

from __future__ import annotations

import json
import math
from functools import lru_cache

import numpy as np

from .dynamics import DynamicsConfig, ELECTROSTATIC, LAWS, SCALAR_FIELD, SIGNAL_COVERAGE
from .engine import Target, World
from .errors import ScenarioError
from .geometry import Region
from .kernels import KernelTable, SignalFunction, derive_kernel
from .profiles import (ElectrostaticProfile, ExponentialFieldProfile,
                       LinearFieldProfile, SignalSumProfile)
from .rng import derived_generator

_TOP_KEYS = ("name", "region", "agents", "sensing_range", "delta", "Delta",
             "noise", "law", "targets", "completion_radius",
             "targets_disappear", "seed", "metrics_resolution")


def _require(d: dict, key: str, path: str = ""):
    if key not in d:
        raise ScenarioError(f"missing required key '{path}{key}'")
    return d[key]


def _no_unknown(d: dict, allowed, path: str = ""):
    for k in d:
        if k not in allowed:
            raise ScenarioError(f"unknown key '{path}{k}'")


def _number(value, key: str, positive: bool = False, nonnegative: bool = False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"'{key}' must be a number")
    v = float(value)
    if not math.isfinite(v):
        raise ScenarioError(f"'{key}' must be finite")
    if positive and not v > 0:
        raise ScenarioError(f"'{key}' must be positive")
    if nonnegative and v < 0:
        raise ScenarioError(f"'{key}' must be nonnegative")
    return v


def _integer(value, key: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"'{key}' must be an integer")
    if minimum is not None and value < minimum:
        raise ScenarioError(f"'{key}' must be at least {minimum}")
    return int(value)


def _boolean(value, key: str) -> bool:
    if not isinstance(value, bool):
        raise ScenarioError(f"'{key}' must be true or false")
    return value


def _point(value, key: str) -> list[float]:
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or any(isinstance(v, bool) or not isinstance(v, (int, float))
                   for v in value)):
        raise ScenarioError(f"'{key}' must be a pair of numbers")
    p = [float(value[0]), float(value[1])]
    if not all(math.isfinite(v) for v in p):
        raise ScenarioError(f"'{key}' must be finite")
    return p


def _box(value, key: str) -> dict:
    if not isinstance(value, dict):
        raise ScenarioError(f"'{key}' must be an object with 'min' and 'max'")
    _no_unknown(value, ("min", "max"), path=f"{key}.")
    lo = _point(_require(value, "min", f"{key}."), f"{key}.min")
    hi = _point(_require(value, "max", f"{key}."), f"{key}.max")
    if not (lo[0] < hi[0] and lo[1] < hi[1]):
        raise ScenarioError(f"'{key}' must satisfy min < max on both axes")
    return {"min": lo, "max": hi}


def _box_region(b: dict) -> Region:
    return Region(b["min"][0], b["min"][1], b["max"][0], b["max"][1])


def _inside(region: Region, p, key: str):
    if not bool(region.contains(np.asarray(p, dtype=float))):
        raise ScenarioError(f"'{key}' must lie inside the region")


class Scenario:
    """A validated scenario with all defaults materialized.

    ``data`` is the canonical JSON-ready dictionary; two scenarios are equal
    iff their documents are.
    """

    def __init__(self, data: dict):
        self.data = data

    def __eq__(self, other):
        return isinstance(other, Scenario) and self.data == other.data

    def __repr__(self):
        return f"Scenario({self.data.get('name', '?')!r})"

    @property
    def name(self) -> str:
        return self.data["name"]

    @property
    def region(self) -> Region:
        return _box_region(self.data["region"])

    @property
    def seed(self) -> int:
        return self.data["seed"]

    @property
    def sensing_range(self) -> float:
        return self.data["sensing_range"]

    @property
    def law(self) -> str:
        return self.data["law"]["kind"]

    def with_seed(self, seed: int) -> "Scenario":
        data = json.loads(json.dumps(self.data))
        data["seed"] = int(seed)
        return Scenario(data)


def _validate_agents(raw, region: Region) -> dict:
    if not isinstance(raw, dict):
        raise ScenarioError("'agents' must be an object")
    _no_unknown(raw, ("mode", "count", "point", "box", "positions"), path="agents.")
    mode = _require(raw, "mode", "agents.")
    if mode not in ("point", "uniform", "list"):
        raise ScenarioError("'agents.mode' must be one of point, uniform, list")
    out: dict = {"mode": mode}
    if mode == "list":
        positions = _require(raw, "positions", "agents.")
        if not isinstance(positions, list) or not positions:
            raise ScenarioError("'agents.positions' must be a nonempty list")
        pts = [_point(p, f"agents.positions[{i}]") for i, p in enumerate(positions)]
        for i, p in enumerate(pts):
            _inside(region, p, f"agents.positions[{i}]")
        if "count" in raw and _integer(raw["count"], "agents.count") != len(pts):
            raise ScenarioError("'agents.count' disagrees with the positions list")
        out["count"] = len(pts)
        out["positions"] = pts
        return out
    count = _integer(_require(raw, "count", "agents."), "agents.count", minimum=1)
    out["count"] = count
    if mode == "point":
        point = _point(raw["point"], "agents.point") if "point" in raw \
            else [float(region.center[0]), float(region.center[1])]
        _inside(region, point, "agents.point")
        out["point"] = point
    else:
        box = _box(raw["box"], "agents.box") if "box" in raw else {
            "min": [region.xmin, region.ymin], "max": [region.xmax, region.ymax]}
        inner = _box_region(box)
        if not (inner.xmin >= region.xmin and inner.ymin >= region.ymin
                and inner.xmax <= region.xmax and inner.ymax <= region.ymax):
            raise ScenarioError("'agents.box' must lie inside the region")
        out["box"] = box
    return out


def _validate_law(raw, sensing_range: float, region: Region) -> dict:
    if not isinstance(raw, dict):
        raise ScenarioError("'law' must be an object")
    kind = _require(raw, "kind", "law.")
    if kind not in LAWS:
        raise ScenarioError(f"'law.kind' must be one of {', '.join(LAWS)}")
    if kind == ELECTROSTATIC:
        _no_unknown(raw, ("kind",), path="law.")
        return {"kind": kind}
    if kind == SCALAR_FIELD:
        _no_unknown(raw, ("kind", "field"), path="law.")
        field = _require(raw, "field", "law.")
        if not isinstance(field, dict):
            raise ScenarioError("'law.field' must be an object")
        fkind = _require(field, "kind", "law.field.")
        if fkind == "linear":
            _no_unknown(field, ("kind", "a", "b"), path="law.field.")
            return {"kind": kind, "field": {
                "kind": "linear",
                "a": _number(_require(field, "a", "law.field."), "law.field.a"),
                "b": _number(_require(field, "b", "law.field."), "law.field.b"),
            }}
        if fkind == "exponential":
            _no_unknown(field, ("kind", "c", "lambda", "center"), path="law.field.")
            center = _point(field["center"], "law.field.center") if "center" in field \
                else [float(region.center[0]), float(region.center[1])]
            return {"kind": kind, "field": {
                "kind": "exponential",
                "c": _number(_require(field, "c", "law.field."), "law.field.c"),
                "lambda": _number(_require(field, "lambda", "law.field."),
                                  "law.field.lambda", positive=True),
                "center": center,
            }}
        raise ScenarioError("'law.field.kind' must be linear or exponential")

    _no_unknown(raw, ("kind", "lambda", "cutoff", "truncation_radius",
                      "hard_truncate_at_sensing", "kernel_resolution",
                      "quad_resolution", "baseline"), path="law.")
    lam = _number(_require(raw, "lambda", "law."), "law.lambda", positive=True)
    cutoff = raw.get("cutoff", "half_sensing")
    if cutoff == "half_sensing":
        cutoff_out: str | float = "half_sensing"
    elif cutoff == "none":
        cutoff_out = "none"
    else:
        cutoff_out = _number(cutoff, "law.cutoff", positive=True)
    out = {
        "kind": kind,
        "lambda": lam,
        "cutoff": cutoff_out,
        "hard_truncate_at_sensing": _boolean(
            raw.get("hard_truncate_at_sensing", False),
            "law.hard_truncate_at_sensing"),
        "kernel_resolution": _integer(raw.get("kernel_resolution", 512),
                                      "law.kernel_resolution", minimum=8),
        "quad_resolution": _integer(raw.get("quad_resolution", 512),
                                    "law.quad_resolution", minimum=64),
        "baseline": _number(raw.get("baseline", 1.0), "law.baseline",
                            nonnegative=True),
    }
    if cutoff_out == "none":
        if "truncation_radius" not in raw:
            raise ScenarioError(
                "'law.truncation_radius' is required when 'law.cutoff' is none")
        out["truncation_radius"] = _number(raw["truncation_radius"],
                                           "law.truncation_radius", positive=True)
    elif "truncation_radius" in raw:
        raise ScenarioError(
            "'law.truncation_radius' only applies when 'law.cutoff' is none")
    return out


def _validate_targets(raw, law: dict, region: Region,
                      sensing_range: float) -> list[dict]:
    if raw is None:
        raw = []
    if not isinstance(raw, list):
        raise ScenarioError("'targets' must be a list")
    if law["kind"] == SCALAR_FIELD and raw:
        raise ScenarioError("scalar_field law takes no targets")
    out = []
    for i, t in enumerate(raw):
        path = f"targets[{i}]."
        if not isinstance(t, dict):
            raise ScenarioError(f"'targets[{i}]' must be an object")
        allowed = ("position", "demand", "lambda") \
            if law["kind"] == SIGNAL_COVERAGE else ("position", "demand")
        _no_unknown(t, allowed, path=path)
        pos = _point(_require(t, "position", path), f"{path}position")
        _inside(region, pos, f"{path}position")
        demand = _integer(_require(t, "demand", path), f"{path}demand", minimum=1)
        entry = {"position": pos, "demand": demand}
        if law["kind"] == SIGNAL_COVERAGE:
            lam = t.get("lambda", law["lambda"])
            entry["lambda"] = _number(lam, f"{path}lambda", positive=True)
            cutoff = _signal_cutoff(law, sensing_range)
            if math.isfinite(cutoff):
                disk = Region(pos[0] - cutoff, pos[1] - cutoff,
                              pos[0] + cutoff, pos[1] + cutoff)
                if not (disk.xmin >= region.xmin and disk.ymin >= region.ymin
                        and disk.xmax <= region.xmax and disk.ymax <= region.ymax):
                    raise ScenarioError(
                        f"'{path}position': the signal disk of radius {cutoff} "
                        "must lie inside the region")
        out.append(entry)
    return out


def _signal_cutoff(law: dict, sensing_range: float) -> float:
    cutoff = law["cutoff"]
    if cutoff == "half_sensing":
        return 0.5 * sensing_range
    if cutoff == "none":
        return math.inf
    return float(cutoff)


def load_scenario(text: str) -> Scenario:
    """Parse and validate a scenario document; all defaults are applied and
    echoed into the returned scenario."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ScenarioError("scenario document must be a JSON object")
    _no_unknown(raw, _TOP_KEYS)

    region_box = _box(_require(raw, "region"), "region")
    region = _box_region(region_box)
    sensing_range = _number(_require(raw, "sensing_range"), "sensing_range",
                            positive=True)
    delta = _number(raw.get("delta", sensing_range / 50.0), "delta", positive=True)
    max_step = _number(raw.get("Delta", 2.0 * delta), "Delta", positive=True)
    if delta > max_step:
        raise ScenarioError(
            f"constraint violated: delta <= Delta (delta={delta}, Delta={max_step})")
    completion_radius = _number(raw.get("completion_radius", sensing_range / 4.0),
                                "completion_radius", positive=True)
    if completion_radius > sensing_range:
        raise ScenarioError(
            "constraint violated: completion_radius <= sensing_range")

    law = _validate_law(_require(raw, "law"), sensing_range, region)
    targets = _validate_targets(raw.get("targets"), law, region, sensing_range)
    agents = _validate_agents(_require(raw, "agents"), region)

    data = {
        "name": raw.get("name", "scenario"),
        "region": region_box,
        "agents": agents,
        "sensing_range": sensing_range,
        "delta": delta,
        "Delta": max_step,
        "noise": _boolean(raw.get("noise", True), "noise"),
        "law": law,
        "targets": targets,
        "completion_radius": completion_radius,
        "targets_disappear": _boolean(raw.get("targets_disappear", False),
                                      "targets_disappear"),
        "seed": _integer(raw.get("seed", 0), "seed", minimum=0),
        "metrics_resolution": _integer(raw.get("metrics_resolution", 512),
                                       "metrics_resolution", minimum=16),
    }
    if not isinstance(data["name"], str):
        raise ScenarioError("'name' must be a string")
    return Scenario(data)


def serialize_scenario(scenario: Scenario) -> str:
    """Canonical JSON for a materialized scenario (reloads to an equal one)."""
    return json.dumps(scenario.data, indent=2) + "\n"


@lru_cache(maxsize=32)
def _cached_kernel(lam: float, cutoff: float, truncation: float | None,
                   kernel_resolution: int, quad_resolution: int) -> KernelTable:
    f = SignalFunction.gaussian(lam, cutoff)
    support = 2.0 * cutoff if math.isfinite(cutoff) else truncation
    return derive_kernel(f, grid_step=support / kernel_resolution,
                         quad_resolution=quad_resolution,
                         truncation_radius=truncation)


def build_world(scenario: Scenario) -> World:
    """Construct the simulation world a scenario describes."""
    d = scenario.data
    region = scenario.region
    seed = d["seed"]
    sensing = d["sensing_range"]

    agents = d["agents"]
    if agents["mode"] == "point":
        positions = np.tile(np.asarray(agents["point"], dtype=float),
                            (agents["count"], 1))
    elif agents["mode"] == "uniform":
        box = _box_region(agents["box"])
        gen = derived_generator(seed, "agent-init")
        positions = gen.uniform([box.xmin, box.ymin], [box.xmax, box.ymax],
                                size=(agents["count"], 2))
    else:
        positions = np.asarray(agents["positions"], dtype=float)

    centers = np.asarray([t["position"] for t in d["targets"]],
                         dtype=float).reshape(-1, 2)
    demands = np.asarray([t["demand"] for t in d["targets"]], dtype=float)
    targets = [Target(id=i, position=centers[i], demand=int(demands[i]))
               for i in range(len(centers))]

    law = d["law"]
    signal = None
    if law["kind"] == SIGNAL_COVERAGE:
        cutoff = _signal_cutoff(law, sensing)
        truncation = law.get("truncation_radius")
        signal = SignalFunction.gaussian(law["lambda"], cutoff)
        base = _cached_kernel(law["lambda"], cutoff, truncation,
                              law["kernel_resolution"], law["quad_resolution"])
        if law["hard_truncate_at_sensing"]:
            base = base.hard_truncated(sensing)
        target_kernels = []
        target_signals = []
        for t in d["targets"]:
            lam_k = t["lambda"]
            table = base if lam_k == law["lambda"] else _cached_kernel(
                lam_k, cutoff, truncation,
                law["kernel_resolution"], law["quad_resolution"])
            if law["hard_truncate_at_sensing"] and table is not base:
                table = table.hard_truncated(sensing)
            target_kernels.append(table.scaled(float(t["demand"])))
            target_signals.append(SignalFunction.gaussian(lam_k, cutoff))
        profile = SignalSumProfile.create(region, centers, tuple(target_signals),
                                          demands, baseline=law["baseline"]) \
            if len(targets) else SignalSumProfile.create(
                region, np.empty((0, 2)), (), np.empty(0),
                baseline=law["baseline"])
        dynamics = DynamicsConfig(SIGNAL_COVERAGE, sensing, d["delta"],
                                  d["Delta"], d["noise"], kernel=base,
                                  target_kernels=tuple(target_kernels))
    elif law["kind"] == ELECTROSTATIC:
        profile = ElectrostaticProfile.create(region, centers, demands, sensing) \
            if len(targets) else ElectrostaticProfile(
                region, 0.0, np.empty((0, 2)), np.empty(0), sensing,
                np.zeros(0, dtype=bool))
        dynamics = DynamicsConfig(ELECTROSTATIC, sensing, d["delta"],
                                  d["Delta"], d["noise"])
    else:
        field = law["field"]
        if field["kind"] == "linear":
            profile = LinearFieldProfile.create(region, field["a"], field["b"])
        else:
            profile = ExponentialFieldProfile.create(
                region, field["c"], field["lambda"], field["center"])
        dynamics = DynamicsConfig(SCALAR_FIELD, sensing, d["delta"],
                                  d["Delta"], d["noise"])

    return World(region=region, positions=positions, targets=targets,
                 profile=profile, dynamics=dynamics,
                 completion_radius=d["completion_radius"],
                 targets_disappear=d["targets_disappear"], seed=seed,
                 signal=signal, metrics_resolution=d["metrics_resolution"])
