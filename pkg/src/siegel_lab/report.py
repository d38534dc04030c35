"""Verification records and their serialisation."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

PASS, FAIL, REPORT_ONLY = "pass", "fail", "report_only"


@dataclass(frozen=True)
class VerificationReport:
    """One identity or bound check.

    ``margin`` is ``bound - |lhs - rhs|``; a bounded check passes iff the
    margin is nonnegative.  ``report_only`` records never fail a suite.
    """

    check_id: str
    params: dict[str, Any] = field(default_factory=dict)
    lhs: float = math.nan
    rhs: float = math.nan
    bound: float = math.nan
    margin: float = math.nan
    verdict: str = REPORT_ONLY

    @property
    def passed(self) -> bool:
        return self.verdict != FAIL

    def sort_key(self) -> tuple[str, str]:
        return self.check_id, _params_text(self.params)

    def to_json(self) -> str:
        rec = {
            "check_id": self.check_id,
            "verdict": self.verdict,
            "lhs": _num(self.lhs),
            "rhs": _num(self.rhs),
            "bound": _num(self.bound),
            "margin": _num(self.margin),
            "params": {k: _num(v) for k, v in sorted(self.params.items())},
        }
        return json.dumps(rec, sort_keys=False, ensure_ascii=False)

    def to_csv_row(self) -> str:
        cells = [self.check_id, self.verdict] + [
            fmt(v) for v in (self.lhs, self.rhs, self.bound, self.margin)
        ]
        return ",".join(cells + [_params_text(self.params)])


CSV_HEADER = "check_id,verdict,lhs,rhs,bound,margin,params"


def fmt(v: Any) -> str:
    """Twelve significant digits for floats, plain text otherwise."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if not math.isfinite(v):
            return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
        return format(v, ".12g")
    return str(v)


def _num(v: Any) -> Any:
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, float):
        if not math.isfinite(v):
            return None
        return float(format(v, ".12g"))
    if isinstance(v, int):
        return v
    return str(v)


def _params_text(params: dict[str, Any]) -> str:
    return ";".join(f"{k}={fmt(v)}" for k, v in sorted(params.items()))


def bounded(check_id: str, params: dict, lhs: float, rhs: float, bound: float) -> VerificationReport:
    margin = float(bound) - abs(float(lhs) - float(rhs))
    verdict = PASS if margin >= 0 else FAIL
    return VerificationReport(check_id, params, float(lhs), float(rhs), float(bound), margin, verdict)


def exact(check_id: str, params: dict, lhs, rhs) -> VerificationReport:
    """Exact equality; lhs and rhs may be ints or Fractions."""
    ok = lhs == rhs
    diff = abs(float(lhs) - float(rhs))
    margin = 0.0 if ok else -(diff or math.ulp(0.0))
    return VerificationReport(
        check_id, params, float(lhs), float(rhs), 0.0, margin, PASS if ok else FAIL
    )


def close(
    check_id: str, params: dict, lhs: float, rhs: float, rel: float, floor: float = 1e-9
) -> VerificationReport:
    tol = max(rel * max(abs(lhs), abs(rhs)), floor)
    return bounded(check_id, params, lhs, rhs, tol)


def report_only(check_id: str, params: dict, lhs=math.nan, rhs=math.nan, bound=math.nan) -> VerificationReport:
    lhs, rhs, bound = float(lhs), float(rhs), float(bound)
    margin = bound - abs(lhs - rhs) if math.isfinite(bound) else math.nan
    return VerificationReport(check_id, params, lhs, rhs, bound, margin, REPORT_ONLY)
