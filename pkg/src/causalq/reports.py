"""Structured pass/fail records produced by every verifier."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class VerificationReport:
    """One verified claim: a named check, a verdict, and numeric evidence.

    ``evidence`` holds the extracted quantities (phases, trace gaps, TV
    distances, ...) and ``tolerances`` the thresholds they were held to.
    """

    check: str
    passed: bool
    scenario: str = ""
    evidence: dict[str, Any] = field(default_factory=dict)
    tolerances: dict[str, float] = field(default_factory=dict)
    runtime_ms: int = 0

    def to_record(
        self, expected: str = "pass", include_runtime: bool = False
    ) -> dict[str, Any]:
        """Flatten into the JSON-lines record shape used by the CLI.

        ``expected`` is "pass" (the default), "fail" (a negative control:
        the record counts as matched when the raw check fails), or
        "signalling" (an informational marker for checks whose positive
        outcome is a signalling witness).  Wall-clock runtime is zeroed
        unless requested, keeping default reports byte-identical.
        """
        matched = (not self.passed) if expected == "fail" else self.passed
        return {
            "scenario": self.scenario,
            "check": self.check,
            "pass": bool(matched),
            "raw_pass": bool(self.passed),
            "expected": expected,
            "evidence": _jsonable(self.evidence),
            "tolerances": _jsonable(self.tolerances),
            "runtime_ms": int(self.runtime_ms) if include_runtime else 0,
        }


def _jsonable(value: Any) -> Any:
    """Recursively coerce numpy scalars/arrays into plain JSON types."""
    import numpy as np

    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value
