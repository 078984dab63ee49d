"""Flat report rows and their CSV / JSON encodings."""
from __future__ import annotations

import csv
import enum
import io
import json
import math
from fractions import Fraction
from typing import Any, Iterable

import numpy as np

from .report import BoundReport

FIXED_HEAD = ("experiment",)
FIXED_TAIL = ("lhs", "rhs", "ratio", "holds", "err", "runtime_ms")

REPORT_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "array",
    "items": {
        "type": "object",
        "required": list(FIXED_HEAD + FIXED_TAIL),
        "properties": {
            "experiment": {"type": "string"},
            "lhs": {"type": ["number", "string"]},
            "rhs": {"type": ["number", "string"]},
            "ratio": {"type": ["number", "string"]},
            "holds": {"type": "boolean"},
            "err": {"type": ["number", "string"]},
            "runtime_ms": {"type": "number", "minimum": 0},
        },
        "patternProperties": {
            "^param_": {"type": ["number", "string", "boolean", "null"]},
        },
        "additionalProperties": False,
    },
}


def plain(value):
    """Convert a parameter value to an int, float, bool, str or None."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else str(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, enum.Enum):
        return value.value
    if value is None or isinstance(value, str):
        return value
    return str(value)


def make_row(experiment: str, report: BoundReport, point: dict, kind: str,
             runtime_ms: float) -> dict[str, Any]:
    row: dict[str, Any] = {"experiment": experiment}
    params = {**point, **{k: v for k, v in report.params.items() if k != "err"}}
    params["check"] = report.label
    params["kind"] = kind
    for key in sorted(params):
        row["param_" + key] = plain(params[key])
    row.update(lhs=report.lhs, rhs=report.rhs, ratio=report.ratio, holds=report.holds,
               err=report.err, runtime_ms=float(runtime_ms))
    return row


def columns(rows: Iterable[dict]) -> list[str]:
    params = sorted({k for r in rows for k in r if k.startswith("param_")})
    return list(FIXED_HEAD) + params + list(FIXED_TAIL)


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    cols = columns(rows)
    writer.writerow(cols)
    for r in rows:
        writer.writerow([_csv_cell(r.get(c)) for c in cols])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return v


def to_json(rows: list[dict]) -> str:
    cleaned = [{k: _json_value(v) for k, v in r.items()} for r in rows]
    return json.dumps(cleaned, indent=1, allow_nan=False) + "\n"


def read_csv(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))


def parse_float(cell) -> float:
    """Inverse of the float encoding used in both formats."""
    return float(cell)
