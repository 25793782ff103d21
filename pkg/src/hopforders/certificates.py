"""Pass/fail records with witnesses, shared by every verifier."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .exactnum import CycNumber


def jsonable(value: Any) -> Any:
    """Convert nested results into plain JSON types, deterministically."""
    if isinstance(value, Certificate):
        return value.to_dict()
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    if isinstance(value, float):
        return value
    if isinstance(value, (CycNumber, Fraction)):
        return str(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if hasattr(value, "tolist"):
        return jsonable(value.tolist())
    return str(value)


@dataclass
class Certificate:
    """Named boolean checks plus optional witnesses for the failing ones."""

    name: str
    checks: dict[str, bool] = field(default_factory=dict)
    witnesses: dict[str, Any] = field(default_factory=dict)
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def __bool__(self) -> bool:
        return self.passed

    def record(self, check: str, ok: bool, witness: Any = None) -> bool:
        self.checks[check] = bool(ok)
        if not ok and witness is not None:
            self.witnesses[check] = witness
        return bool(ok)

    def failed(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v]

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "checks": dict(self.checks),
            "witnesses": jsonable(self.witnesses),
            "details": jsonable(self.details),
        }

    def __repr__(self) -> str:
        status = "pass" if self.passed else "FAIL " + ",".join(self.failed())
        return f"Certificate({self.name}: {status})"
