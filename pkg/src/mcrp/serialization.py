"""JSON instance and plan files.

Instance files carry degrees, kilometres and seconds. Rewards are written as
run-length encoded runs over steps per target (dense matrices are accepted on
read), thresholds as a default plus sparse runs. Writers are canonical, so a
read followed by a write reproduces the file byte for byte.
"""

from __future__ import annotations

import json
from typing import Any

import jsonschema
import numpy as np

from .errors import SchemaError
from .maneuver import SlotGridSpec
from .model import (
    InstanceConfig,
    McrpInstance,
    ReconfigurationPlan,
    SatelliteSpec,
    TargetSpec,
    objective,
    plan_delta_v,
)

SCHEMA_VERSION = 1

_NUM = {"type": "number"}
_INT = {"type": "integer"}
_RUN = {
    "type": "object",
    "required": ["target", "start", "end", "value"],
    "properties": {"target": _INT, "start": _INT, "end": _INT, "value": _NUM},
    "additionalProperties": False,
}

INSTANCE_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "time_grid", "satellites", "targets", "rewards", "thresholds", "slot_grid"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "time_grid": {
            "type": "object",
            "required": ["T", "step_seconds", "stages"],
            "properties": {"T": _INT, "step_seconds": _NUM, "stages": _INT},
            "additionalProperties": False,
        },
        "satellites": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["altitude_km", "inclination_deg", "raan_deg", "arg_lat_deg", "c_max_kms"],
                "properties": {
                    "altitude_km": _NUM,
                    "inclination_deg": _NUM,
                    "raan_deg": _NUM,
                    "arg_lat_deg": _NUM,
                    "c_max_kms": _NUM,
                    "in_budget_subset": {"type": "boolean"},
                },
                "additionalProperties": False,
            },
        },
        "targets": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["lat_deg", "lon_deg"],
                "properties": {"lat_deg": _NUM, "lon_deg": _NUM, "min_elevation_deg": _NUM},
                "additionalProperties": False,
            },
        },
        "rewards": {
            "oneOf": [
                {
                    "type": "object",
                    "required": ["encoding", "runs"],
                    "properties": {"encoding": {"const": "runs"}, "runs": {"type": "array", "items": _RUN}},
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "required": ["encoding", "values"],
                    "properties": {
                        "encoding": {"const": "dense"},
                        "values": {"type": "array", "items": {"type": "array", "items": _NUM}},
                    },
                    "additionalProperties": False,
                },
            ]
        },
        "thresholds": {
            "type": "object",
            "required": ["default"],
            "properties": {
                "default": {"type": "integer", "minimum": 1},
                "runs": {"type": "array", "items": _RUN},
            },
            "additionalProperties": False,
        },
        "slot_grid": {
            "oneOf": [
                {
                    "type": "object",
                    "required": ["mode", "J"],
                    "properties": {"mode": {"const": "phase-only"}, "J": {"type": "integer", "minimum": 1}},
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "required": ["mode", "plane_steps", "phase_count", "eta"],
                    "properties": {
                        "mode": {"const": "plane-and-phase"},
                        "plane_steps": {"type": "integer", "minimum": 0},
                        "phase_count": {"type": "integer", "minimum": 1},
                        "eta": _NUM,
                    },
                    "additionalProperties": False,
                },
            ]
        },
        "gmst0_deg": _NUM,
    },
    "additionalProperties": False,
}

PLAN_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "assignment"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "assignment": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
        "objective": _NUM,
        "per_satellite_delta_v": {"type": "array", "items": _NUM},
    },
    "additionalProperties": False,
}


def _error_path(err: jsonschema.ValidationError) -> str:
    parts = [str(p) for p in err.absolute_path]
    if err.validator == "required" and isinstance(err.instance, dict):
        missing = [name for name in err.validator_value if name not in err.instance]
        if missing:
            parts.append(missing[0])
    return "/".join(parts)


def _validate(doc: Any, schema: dict) -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        raise SchemaError(_error_path(err), err.message)


def _loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"not valid JSON ({exc})") from exc


def _dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _runs(matrix: np.ndarray, skip) -> list[dict]:
    """Maximal constant runs along steps, per target, omitting ``skip`` values."""
    out = []
    T, P = matrix.shape
    for p in range(P):
        col = matrix[:, p]
        start = 0
        for t in range(1, T + 1):
            if t == T or col[t] != col[start]:
                if col[start] != skip:
                    out.append({"target": p, "start": start + 1, "end": t, "value": col[start].item()})
                start = t
    return out


def _apply_runs(matrix: np.ndarray, runs: list[dict], where: str) -> None:
    T, P = matrix.shape
    for n, run in enumerate(runs):
        p, a, b = run["target"], run["start"], run["end"]
        if not (0 <= p < P and 1 <= a <= b <= T):
            raise SchemaError(f"{where}/{n}", f"run target {p} steps [{a}, {b}] outside (T={T}, P={P})")
        matrix[a - 1 : b, p] = run["value"]


def instance_to_dict(config: InstanceConfig) -> dict:
    spec = config.slot_grid
    if spec.mode == "phase-only":
        grid = {"mode": "phase-only", "J": spec.phase_count}
    else:
        grid = {
            "mode": "plane-and-phase",
            "plane_steps": spec.plane_steps_per_side,
            "phase_count": spec.phase_count,
            "eta": float(spec.eta),
        }
    thresholds = np.asarray(config.thresholds, dtype=np.int64)
    default = 1
    if thresholds.size:
        values, counts = np.unique(thresholds, return_counts=True)
        default = int(values[np.argmax(counts)])
    return {
        "schema_version": SCHEMA_VERSION,
        "time_grid": {"T": config.total_steps, "step_seconds": float(config.step_seconds), "stages": config.stages},
        "satellites": [
            {
                "altitude_km": float(s.altitude_km),
                "inclination_deg": float(s.inclination_deg),
                "raan_deg": float(s.raan_deg),
                "arg_lat_deg": float(s.arg_lat_deg),
                "c_max_kms": float(s.c_max_kms),
                "in_budget_subset": bool(s.in_budget_subset),
            }
            for s in config.satellites
        ],
        "targets": [
            {"lat_deg": float(t.lat_deg), "lon_deg": float(t.lon_deg), "min_elevation_deg": float(t.min_elevation_deg)}
            for t in config.targets
        ],
        "rewards": {"encoding": "runs", "runs": _runs(np.asarray(config.rewards, dtype=float), 0.0)},
        "thresholds": {"default": default, "runs": _runs(thresholds, default)},
        "slot_grid": grid,
        "gmst0_deg": float(config.gmst0_deg),
    }


def instance_from_dict(doc: Any) -> InstanceConfig:
    _validate(doc, INSTANCE_SCHEMA)
    tg = doc["time_grid"]
    T = tg["T"]
    P = len(doc["targets"])
    rewards = np.zeros((T, P))
    rw = doc["rewards"]
    if rw["encoding"] == "runs":
        _apply_runs(rewards, rw["runs"], "rewards/runs")
    else:
        dense = np.asarray(rw["values"], dtype=float)
        if dense.shape != (T, P):
            raise SchemaError("rewards/values", f"dense rewards must be {T}x{P}, got {dense.shape}")
        rewards = dense
    th = doc["thresholds"]
    thresholds = np.full((T, P), th["default"], dtype=np.int64)
    _apply_runs(thresholds, th.get("runs", []), "thresholds/runs")
    sg = doc["slot_grid"]
    if sg["mode"] == "phase-only":
        spec = SlotGridSpec("phase-only", sg["J"])
    else:
        spec = SlotGridSpec("plane-and-phase", sg["phase_count"], sg["plane_steps"], sg["eta"])
    return InstanceConfig(
        total_steps=T,
        step_seconds=float(tg["step_seconds"]),
        stages=tg["stages"],
        satellites=tuple(
            SatelliteSpec(
                float(s["altitude_km"]),
                float(s["inclination_deg"]),
                float(s["raan_deg"]),
                float(s["arg_lat_deg"]),
                float(s["c_max_kms"]),
                s.get("in_budget_subset", True),
            )
            for s in doc["satellites"]
        ),
        targets=tuple(
            TargetSpec(float(t["lat_deg"]), float(t["lon_deg"]), float(t.get("min_elevation_deg", 0.0)))
            for t in doc["targets"]
        ),
        rewards=rewards,
        thresholds=thresholds,
        slot_grid=spec,
        gmst0_deg=float(doc.get("gmst0_deg", 0.0)),
    )


def serialize_instance(config: InstanceConfig) -> str:
    return _dumps(instance_to_dict(config))


def deserialize_instance(text: str) -> InstanceConfig:
    return instance_from_dict(_loads(text))


def serialize_plan(plan: ReconfigurationPlan, instance: McrpInstance | None = None) -> str:
    doc: dict[str, Any] = {"schema_version": SCHEMA_VERSION, "assignment": [list(row) for row in plan.assignment]}
    if instance is not None:
        doc["objective"] = objective(plan, instance)
        doc["per_satellite_delta_v"] = plan_delta_v(plan, instance)
    return _dumps(doc)


def deserialize_plan(text: str) -> ReconfigurationPlan:
    doc = _loads(text)
    _validate(doc, PLAN_SCHEMA)
    return ReconfigurationPlan(tuple(tuple(row) for row in doc["assignment"]))
