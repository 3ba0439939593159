"""Machine-readable reports: JSON documents validated against the shipped
schemas, plus the CSV outputs.

Numeric fields are emitted at full precision together with a rounded
display string (5 decimals for rates and risks, 2 for money).  All
serialization is deterministic: sorted keys, fixed indentation, no
wall-clock anywhere, so identical runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
from importlib import resources

import jsonschema

from .detection import TestLine, TestReport
from .revenue import SweepRow
from .risk import HazardComparison, HazardValue, RiskReport

SCHEMA_NAMES = ("test_report", "risk_report", "hazard_comparison", "sweep")


def _display(x: float, places: int = 5) -> str:
    return f"{x:.{places}f}"


def load_schema(name: str) -> dict:
    if name not in SCHEMA_NAMES:
        raise ValueError(f"unknown schema {name!r}")
    path = resources.files("fairaudit.schemas").joinpath(f"{name}.schema.json")
    return json.loads(path.read_text(encoding="utf-8"))


def validate(doc: dict, schema_name: str):
    jsonschema.validate(doc, load_schema(schema_name),
                        cls=jsonschema.Draft202012Validator)


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_json(path, doc: dict, schema_name: str | None = None):
    if schema_name is not None:
        validate(doc, schema_name)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(doc))


# --- report dictionaries -----------------------------------------------------

def line_to_dict(line: TestLine) -> dict:
    div = None
    if line.divergence is not None:
        div = {"kind": line.divergence.kind,
               "value": line.divergence.value,
               "value_display": _display(line.divergence.value)}
    return {
        "conditions": [{"column": c, "value": v} for c, v in line.conditions],
        "compared": list(line.compared),
        "union_count": line.union_count,
        "divergence": div,
        "epsilon": line.epsilon,
        "epsilon_display": None if line.epsilon is None else _display(line.epsilon),
        "violated": line.violated,
        "warnings": list(line.warnings),
    }


def test_report_to_dict(report: TestReport) -> dict:
    return {
        "sensitive_feature": report.sensitive_feature,
        "mode": report.mode,
        "divergence_kind": report.divergence_kind,
        "aggregation_mode": report.aggregation_mode,
        "dataset_size": report.dataset_size,
        "conditioning_columns": list(report.conditioning_columns),
        "lines": [line_to_dict(line) for line in report.lines],
        "warnings": list(report.warnings),
    }


def hazard_to_dict(h: HazardValue) -> dict:
    return {
        "test": h.test,
        "mode": h.mode,
        "value": h.value,
        "value_display": _display(h.value),
        "line_contributions": list(h.line_contributions),
    }


def risk_report_to_dict(report: RiskReport, target: str) -> dict:
    return {
        "target": target,
        "hazards": [hazard_to_dict(h) for h in report.hazards],
        "overall": report.overall,
        "overall_display": _display(report.overall),
    }


def risk_report_from_dict(doc: dict) -> tuple[RiskReport, str]:
    validate(doc, "risk_report")
    hazards = tuple(HazardValue(test=h["test"], mode=h["mode"], value=h["value"],
                                line_contributions=tuple(h["line_contributions"]))
                    for h in doc["hazards"])
    return RiskReport(hazards=hazards, overall=doc["overall"]), doc["target"]


def comparison_to_dict(cmp: HazardComparison) -> dict:
    return {
        "entries": [{
            "feature": e.feature,
            "mode": e.mode,
            "data_hazard": e.data_hazard,
            "model_hazard": e.model_hazard,
            "difference": e.difference,
            "difference_display": _display(e.difference),
        } for e in cmp.entries],
        "data_overall": cmp.data_overall,
        "model_overall": cmp.model_overall,
        "overall_difference": cmp.overall_difference,
        "overall_difference_display": _display(cmp.overall_difference),
    }


def sweep_to_dict(rows: list[SweepRow], provision_factor: float,
                  interest_rate: float) -> dict:
    out = []
    for r in rows:
        out.append({
            "threshold": r.threshold,
            "accepted_count": r.accepted_count,
            "bad_rate": r.bad_rate,
            "bad_rate_display": _display(r.bad_rate),
            "provisions": r.provisions,
            "provisions_display": _display(r.provisions, 2),
            "profit": r.profit,
            "profit_display": _display(r.profit, 2),
            "model_risk": r.model_risk,
            "model_risk_display": _display(r.model_risk),
            "data_risk": r.data_risk,
            "data_risk_display": _display(r.data_risk),
            "risk_difference": r.risk_difference,
            "risk_difference_display": _display(r.risk_difference),
            "warnings": list(r.warnings),
        })
    return {"provision_factor": provision_factor,
            "interest_rate": interest_rate,
            "rows": out}


# --- CSV ---------------------------------------------------------------------

def write_scores_csv(path, scores, classifications):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["row_id", "score", "classification"])
        for i, (s, c) in enumerate(zip(scores, classifications)):
            writer.writerow([i, s, c])


def read_scores_csv(path) -> list[int]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:2] != ["row_id", "score"]:
            raise ValueError(f"{path}: not a scores CSV (expected row_id,score,... header)")
        scores = []
        for row in reader:
            scores.append(int(row[1]))
    return scores


def write_sweep_csv(path, rows: list[SweepRow]):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SweepRow.FIELDS)
        for r in rows:
            writer.writerow([repr(getattr(r, f)) if isinstance(getattr(r, f), float)
                             else getattr(r, f) for f in SweepRow.FIELDS])
