"""JSON analysis reports.

Index sets in reports are 1-based, like the variable names in problem files.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from typing import Optional

import jsonschema

__all__ = ["AnalysisReport", "REPORT_SCHEMA", "SUITE_SCHEMA", "validate", "dumps"]

_num_list = {"type": "array", "items": {"type": "number"}}
_verdict = {
    "type": "object",
    "required": ["holds", "rank"],
    "properties": {
        "holds": {"type": "boolean"},
        "rank": {"type": "object", "required": ["rank", "rows", "cols", "fullRowRank"]},
        "witness": {"type": "object", "required": ["feasible", "d", "margin"]},
    },
}
_stat = {
    "type": "object",
    "required": ["holds", "multipliers", "residuals", "qualifiers"],
    "properties": {
        "holds": {"type": "boolean"},
        "multipliers": {"type": ["object", "null"]},
        "residuals": {"type": ["object", "null"]},
        "qualifiers": {"type": ["object", "null"]},
        "certificate": {"type": "object"},
    },
}
_outcome = {
    "type": "object",
    "required": ["theorem", "lhs", "rhs", "agree"],
    "properties": {"theorem": {"type": "string"}, "agree": {"type": "boolean"}},
}

REPORT_SCHEMA = {
    "type": "object",
    "required": ["problem", "point", "policy", "switching", "cq", "stationarity",
                 "secondOrder", "equivalence", "version"],
    "properties": {
        "problem": {"type": "string"},
        "point": _num_list,
        "policy": {"type": "object"},
        "switching": {
            "type": "object",
            "required": ["z", "sigma", "alpha", "activeIneq", "margins"],
            "properties": {
                "z": _num_list,
                "sigma": {"type": "array", "items": {"enum": [-1, 0, 1]}},
                "alpha": {"type": "array", "items": {"type": "integer"}},
                "activeIneq": {"type": "array", "items": {"type": "integer"}},
                "margins": {"type": "object"},
            },
        },
        "cq": {
            "type": "object",
            "required": ["likq", "idkq", "mpccLicq", "mpccMfcq"],
            "properties": {k: _verdict for k in ("likq", "idkq", "mpccLicq", "mpccMfcq")},
        },
        "stationarity": {
            "type": "object",
            "required": ["kink", "s"],
            "properties": {"kink": _stat, "s": _stat},
        },
        "secondOrder": {
            "type": "object",
            "required": ["basisCols", "eigenvalues", "classification", "vacuous"],
            "properties": {
                "basisCols": {"type": "integer", "minimum": 0},
                "eigenvalues": _num_list,
                "classification": {"enum": ["sufficient-holds", "necessary-holds", "fails",
                                            "inconclusive", "not-applicable"]},
                "vacuous": {"type": "boolean"},
            },
        },
        "equivalence": {"type": "array", "items": _outcome},
        "version": {"type": "string"},
        "timing": {"type": "object"},
    },
}

SUITE_SCHEMA = {
    "type": "object",
    "required": ["problem", "seed", "samples", "summary", "violations", "equivalence",
                 "version"],
    "properties": {
        "summary": {"type": "object"},
        "violations": {"type": "array", "items": _outcome},
        "equivalence": {"type": "array", "items": _outcome},
        "version": {"type": "string"},
    },
}


def validate(data: dict, schema=None):
    """Raise :class:`jsonschema.ValidationError` if ``data`` does not match."""
    jsonschema.validate(data, schema or REPORT_SCHEMA)


def dumps(data: dict) -> str:
    return json.dumps(data, indent=2, allow_nan=False) + "\n"


@dataclass
class AnalysisReport:
    problem: str
    point: list
    policy: dict
    switching: dict
    cq: dict
    stationarity: dict
    secondOrder: dict
    equivalence: list
    version: str
    timing: Optional[dict] = field(default=None, compare=False)

    def to_dict(self):
        out = asdict(self)
        if self.timing is None:
            out.pop("timing")
        return out

    @classmethod
    def from_dict(cls, data):
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in names})

    def to_json(self, timing=True):
        d = self.to_dict()
        if not timing:
            d.pop("timing", None)
        return dumps(d)
