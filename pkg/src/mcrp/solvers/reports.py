"""JSON form of solve reports."""

from __future__ import annotations

import json
from typing import Any

from ..errors import SchemaError
from ..model import ReconfigurationPlan
from .methods import SolveReport, UpperBound

REPORT_VERSION = 1


def report_to_dict(report: SolveReport) -> dict:
    ub = report.upper_bound
    return {
        "schema_version": REPORT_VERSION,
        "method": report.method,
        "lookahead": report.lookahead,
        "objective": report.objective,
        "best_bound": report.best_bound,
        "duality_gap": report.duality_gap,
        "stage_objectives": list(report.stage_objectives),
        "assignment": None if report.plan is None else [list(row) for row in report.plan.assignment],
        "runtime_s": report.runtime,
        "nodes": report.nodes,
        "subproblems": report.subproblems,
        "timed_out": report.timed_out,
        "lp_relaxation_value": report.lp_relaxation_value,
        "upper_bound": None
        if ub is None
        else {"value": ub.value, "per_stage": list(ub.per_stage), "per_satellite": [list(r) for r in ub.per_satellite]},
        "instance_digest": report.instance_digest,
        "extra": report.extra,
    }


def report_from_dict(doc: Any) -> SolveReport:
    if not isinstance(doc, dict) or doc.get("schema_version") != REPORT_VERSION:
        raise SchemaError("schema_version", f"expected report schema version {REPORT_VERSION}")
    for key in ("method", "objective", "best_bound", "stage_objectives", "runtime_s", "instance_digest"):
        if key not in doc:
            raise SchemaError(key, "is a required property")
    ub = doc.get("upper_bound")
    plan = doc.get("assignment")
    return SolveReport(
        method=doc["method"],
        objective=doc["objective"],
        plan=None if plan is None else ReconfigurationPlan(tuple(tuple(r) for r in plan)),
        best_bound=doc["best_bound"],
        duality_gap=doc.get("duality_gap"),
        stage_objectives=tuple(doc["stage_objectives"]),
        runtime=doc["runtime_s"],
        nodes=doc.get("nodes", 0),
        subproblems=doc.get("subproblems", 0),
        timed_out=doc.get("timed_out", False),
        lookahead=doc.get("lookahead"),
        upper_bound=None
        if ub is None
        else UpperBound(ub["value"], tuple(ub["per_stage"]), tuple(tuple(r) for r in ub["per_satellite"])),
        lp_relaxation_value=doc.get("lp_relaxation_value"),
        instance_digest=doc["instance_digest"],
        extra=dict(doc.get("extra") or {}),
    )


def dumps_report(report: SolveReport) -> str:
    return json.dumps(report_to_dict(report), indent=2) + "\n"


def loads_report(text: str) -> SolveReport:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"not valid JSON ({exc})") from exc
    return report_from_dict(doc)
