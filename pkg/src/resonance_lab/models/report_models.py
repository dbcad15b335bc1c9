"""Report rows and run summaries."""

import math
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

CSV_COLUMNS = (
    "scenario",
    "check",
    "lambda",
    "r_or_interval",
    "measured",
    "expected",
    "tolerance",
    "status",
    "reason",
)

INTERNAL_ERROR = "INTERNAL_ERROR"


def format_float(value: float) -> str:
    """Fixed 17-significant-digit rendering, stable across runs."""
    return format(value, ".17g")


def format_interval(a: float, b: float) -> str:
    return f"[{format_float(a)},{format_float(b)}]"


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"


class CheckReport(BaseModel):
    """One (scenario, check, λ) verification row."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    scenario: str
    check: str
    lam: float = Field(..., alias="lambda")
    r_or_interval: str = ""
    measured: Optional[float] = None
    expected: Optional[float] = None
    tolerance: float
    status: CheckStatus
    reason: Optional[str] = None
    incident_id: Optional[str] = None

    @classmethod
    def from_measurement(
        cls,
        *,
        scenario: str,
        check: str,
        lam: float,
        r_or_interval: str,
        measured: float,
        expected: float,
        tolerance: float,
    ) -> "CheckReport":
        """Row whose status is pass iff ``|measured - expected| <= tolerance``."""
        gap = abs(measured - expected)
        status = CheckStatus.PASS if math.isfinite(gap) and gap <= tolerance else CheckStatus.FAIL
        return cls(
            scenario=scenario,
            check=check,
            lam=lam,
            r_or_interval=r_or_interval,
            measured=measured,
            expected=expected,
            tolerance=tolerance,
            status=status,
        )

    @classmethod
    def skipped(
        cls,
        *,
        scenario: str,
        check: str,
        lam: float,
        r_or_interval: str,
        tolerance: float,
        reason: str,
        incident_id: Optional[str] = None,
    ) -> "CheckReport":
        return cls(
            scenario=scenario,
            check=check,
            lam=lam,
            r_or_interval=r_or_interval,
            tolerance=tolerance,
            status=CheckStatus.SKIPPED,
            reason=reason,
            incident_id=incident_id,
        )

    @property
    def sort_key(self):
        return (self.scenario, self.check, self.lam)


class RunSummary(BaseModel):
    run_id: str
    scenarios: List[str]
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    skipped_by_reason: Dict[str, int] = Field(default_factory=dict)
    exit_code: int = 0

    @classmethod
    def from_reports(cls, run_id: str, scenarios: List[str], reports: List[CheckReport]) -> "RunSummary":
        counts = {status: 0 for status in CheckStatus}
        by_reason: Dict[str, int] = {}
        for report in reports:
            counts[report.status] += 1
            if report.status is CheckStatus.SKIPPED:
                by_reason[report.reason] = by_reason.get(report.reason, 0) + 1
        return cls(
            run_id=run_id,
            scenarios=scenarios,
            passed=counts[CheckStatus.PASS],
            failed=counts[CheckStatus.FAIL],
            skipped=counts[CheckStatus.SKIPPED],
            skipped_by_reason=dict(sorted(by_reason.items())),
            exit_code=1 if counts[CheckStatus.FAIL] else 0,
        )
