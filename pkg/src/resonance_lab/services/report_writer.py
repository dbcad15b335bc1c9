"""CSV and JSON report files.

The CSV is the plot-ready verification table; the JSON carries the same rows
plus the run summary for CI assertions. Both are byte-stable across runs.
"""

import csv
import json
import logging
from pathlib import Path
from typing import List, Optional, Sequence

from resonance_lab.models.report_models import CSV_COLUMNS, CheckReport, RunSummary, format_float

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ("lambda", "r", "theta", "theta_prime_lorentzian", "theta_prime_fd")


def _cell(value: Optional[float]) -> str:
    return "" if value is None else format_float(value)


def csv_row(report: CheckReport) -> List[str]:
    return [
        report.scenario,
        report.check,
        format_float(report.lam),
        report.r_or_interval,
        _cell(report.measured),
        _cell(report.expected),
        format_float(report.tolerance),
        report.status.value,
        report.reason or "",
    ]


def write_csv(path: Path, reports: Sequence[CheckReport]) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        writer.writerows(csv_row(report) for report in reports)
    return path


def write_json(path: Path, reports: Sequence[CheckReport], summary: RunSummary) -> Path:
    payload = {
        "summary": json.loads(summary.model_dump_json()),
        "rows": [json.loads(report.model_dump_json(by_alias=True)) for report in reports],
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return path


def write_reports(out_dir: Path, stem: str, reports: Sequence[CheckReport], summary: RunSummary) -> List[Path]:
    """Write ``<stem>.csv`` and ``<stem>.json`` into ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [
        write_csv(out_dir / f"{stem}.csv", reports),
        write_json(out_dir / f"{stem}.json", reports, summary),
    ]
    logger.info("reports written", extra={"paths": [str(p) for p in paths], "rows": len(reports)})
    return paths


def write_trace_csv(path: Path, rows: Sequence[Sequence[float]]) -> Path:
    """Trace rows ``(λ, r, θ, θ' Lorentzian, θ' finite difference)``."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        writer.writerows([format_float(v) for v in row] for row in rows)
    return Path(path)
