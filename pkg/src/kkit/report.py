"""Result records shared by every audit and the JSON report."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import __version__

PASS = "pass"
FAIL = "fail"
NOT_APPLICABLE = "not-applicable"
EXPECTED_FAIL = "expected-fail"
STATUSES = (PASS, FAIL, NOT_APPLICABLE, EXPECTED_FAIL)

SCHEMA_VERSION = 1


@dataclass
class CheckResult:
    """Outcome of one check for one (group, prime)."""

    check: str
    group: str
    p: int | None
    status: str
    statement: str = ""
    details: dict = field(default_factory=dict)
    witness: dict | None = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def ok(self) -> bool:
        return self.status != FAIL

    def as_dict(self) -> dict:
        out = {
            "check": self.check,
            "group": self.group,
            "p": self.p,
            "status": self.status,
            "statement": self.statement,
            "details": _jsonable(self.details),
        }
        if self.witness is not None:
            out["witness"] = _jsonable(self.witness)
        return out


def status_of(ok: bool, applicable: bool = True, expected_failure: bool = False) -> str:
    if not applicable:
        return NOT_APPLICABLE
    if ok:
        return PASS
    return EXPECTED_FAIL if expected_failure else FAIL


@dataclass
class VerificationReport:
    seed: int
    config: dict = field(default_factory=dict)
    results: list[CheckResult] = field(default_factory=list)
    timing: dict | None = None

    def extend(self, items) -> None:
        self.results.extend(items)

    @property
    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if r.status == FAIL]

    def counts(self) -> dict[str, int]:
        return {s: sum(r.status == s for r in self.results) for s in STATUSES}

    def as_dict(self) -> dict:
        out = {
            "schema": SCHEMA_VERSION,
            "version": __version__,
            "seed": self.seed,
            "config": _jsonable(self.config),
            "summary": self.counts(),
            "results": [r.as_dict() for r in self.results],
        }
        if self.timing is not None:
            out["timing"] = self.timing
        return out

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(_jsonable(v) for v in obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "numerator") and getattr(obj, "denominator", 1) != 1:
        return f"{obj.numerator}/{obj.denominator}"
    try:
        return int(obj)
    except (TypeError, ValueError):
        return str(obj)
