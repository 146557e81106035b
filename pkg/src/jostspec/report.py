"""Verification report entries and their JSON form."""
from __future__ import annotations

import json
import math
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field

import numpy as np

PASS = "pass"
FAIL = "fail"
DEGENERATE = "degenerate"
SKIPPED = "skipped"

STRICT_TOL = 1e-9
_tol = [STRICT_TOL]


@contextmanager
def tolerance(tol: float):
    """Temporarily replace the default margin tolerance of strict/nonstrict."""
    _tol.append(float(tol))
    try:
        yield
    finally:
        _tol.pop()


@dataclass
class ReportEntry:
    theorem: str
    statement: str
    left: float | None
    right: float | None
    margin: float | None
    status: str
    tolerance: float
    note: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def strict(theorem: str, statement: str, left: float, right: float, tol: float | None = None) -> ReportEntry:
    """left < right: pass above tol, degenerate within tol, fail below -tol."""
    tol = _tol[-1] if tol is None else tol
    margin = right - left
    if margin > tol:
        status = PASS
    elif margin >= -tol:
        status = DEGENERATE
    else:
        status = FAIL
    return ReportEntry(theorem, statement, left, right, margin, status, tol)


def nonstrict(theorem: str, statement: str, left: float, right: float, tol: float | None = None) -> ReportEntry:
    """left <= right up to tol."""
    tol = _tol[-1] if tol is None else tol
    margin = right - left
    status = PASS if margin >= -tol else FAIL
    return ReportEntry(theorem, statement, left, right, margin, status, tol)


def equal(theorem: str, statement: str, left, right) -> ReportEntry:
    """Exact integer identity."""
    ok = left == right
    return ReportEntry(theorem, statement, left, right, float(right - left), PASS if ok else FAIL, 0.0)


def skipped(theorem: str, statement: str, reason: str) -> ReportEntry:
    return ReportEntry(theorem, statement, None, None, None, SKIPPED, 0.0, reason)


def failed(theorem: str, statement: str, reason: str) -> ReportEntry:
    return ReportEntry(theorem, statement, None, None, None, FAIL, 0.0, reason)


@dataclass
class VerificationReport:
    entries: list[ReportEntry] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def extend(self, entries) -> None:
        self.entries.extend(entries)

    @property
    def failures(self) -> list[ReportEntry]:
        return [e for e in self.entries if e.status == FAIL]

    @property
    def ok(self) -> bool:
        return not self.failures

    def by_theorem(self, theorem: str) -> list[ReportEntry]:
        return [e for e in self.entries if e.theorem == theorem]

    def to_dict(self) -> dict:
        return {"metadata": self.metadata, "entries": [e.to_dict() for e in self.entries]}

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        return cls([ReportEntry(**e) for e in d["entries"]], dict(d.get("metadata", {})))

    def to_json(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "VerificationReport":
        return cls.from_dict(json.loads(text))


def _fmt(obj):
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            return str(obj)
        return float(f"{obj:.17g}")
    if isinstance(obj, dict):
        return {k: _fmt(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_fmt(v) for v in obj]
    return obj


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, floats at 17 significant digits."""
    return json.dumps(_fmt(obj), sort_keys=True, indent=1)
