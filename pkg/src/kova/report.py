"""JSON report assembly and schema validation."""

from __future__ import annotations

import json
from importlib import resources

from .polyalg import format_scalar

SCHEMA_VERSION = "1.0"


def scalar_str(v) -> str:
    """Exact values as fraction strings (``"-10/7"``), inexact ones via ``repr``."""
    return format_scalar(v)


def matrix(M):
    return [[scalar_str(v) for v in row] for row in M]


def grading_json(g):
    return None if g is None else g.to_json()


def balance_json(b, weights, defect=None):
    return {"c": [scalar_str(v) for v in b.c], "exact": b.exact, "origin": b.origin,
            "residual": float(b.residual), "degenerate": b.is_degenerate(weights),
            "scale_invariant_defect": defect}


def kdata_json(k):
    return {"K": matrix(k.K),
            "exponents": [{"value": scalar_str(v), "exact": e} for v, e in k.exponents],
            "minus_one_witness": None if k.minus_one_witness is None
            else [scalar_str(v) for v in k.minus_one_witness],
            "witness_ok": k.witness_ok,
            "charpoly": [scalar_str(v) for v in k.charpoly]}


def load_schema() -> dict:
    text = resources.files("kova").joinpath("schema/report.schema.json").read_text("utf-8")
    return json.loads(text)


def validate(report: dict):
    """Raise ``jsonschema.ValidationError`` if the report does not match."""
    import jsonschema

    jsonschema.validate(report, load_schema())


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False) + "\n"
