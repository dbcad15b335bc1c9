"""Load scenarios, run their checks and assemble reports.

Module errors never escape a run: a ``LabError`` becomes a skipped row with
its reason code, anything else a skipped row with ``INTERNAL_ERROR``. Rows
may be computed on a thread pool; the report order is always
(scenario, check, λ).
"""

import contextvars
import hashlib
import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import ValidationError

from resonance_lab.config.logging_config import run_id_var
from resonance_lab.config.settings import CheckTolerances, get_settings
from resonance_lab.metrics.check_metrics import CheckMetrics
from resonance_lab.models.report_models import INTERNAL_ERROR, CheckReport, RunSummary
from resonance_lab.models.scenario_models import Scenario
from resonance_lab.services import rank_one_engine as rank_one
from resonance_lab.services.check_suite import CHECKS, CheckContext, default_label
from resonance_lab.services.mlflow_service import MLflowService
from resonance_lab.services.report_writer import write_reports, write_trace_csv
from resonance_lab.utils.exceptions import LabError, ScenarioConfigError, incident_id

logger = logging.getLogger(__name__)


# =============================================================================
# LOADING
# =============================================================================


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    """Validate a scenario document.

    Raises:
        ScenarioConfigError: malformed JSON (with line and column) or a field
            that fails validation (with its dotted location).
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioConfigError(
            f"{source}: line {e.lineno}, column {e.colno}: {e.msg}",
            location=f"line {e.lineno}, column {e.colno}",
        ) from e
    try:
        return Scenario.model_validate(document)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first.get("loc", ())) or "scenario"
        raise ScenarioConfigError(f"{source}: {location}: {first.get('msg')}", location=location) from e


def load_scenario(path: Union[str, Path]) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioConfigError(f"cannot read scenario {path}: {e.strerror}", location=str(path)) from e
    return parse_scenario(text, source=str(path))


# =============================================================================
# RUNNING
# =============================================================================


@dataclass
class ScenarioRun:
    reports: List[CheckReport]
    summary: RunSummary
    paths: List[Path] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return self.summary.exit_code


def make_run_id(scenarios: Sequence[Scenario], seed: int) -> str:
    """Deterministic id of (scenarios, seed)."""
    material = json.dumps(
        [json.loads(s.model_dump_json()) for s in scenarios] + [seed],
        sort_keys=True,
    )
    return "run_" + hashlib.md5(material.encode("utf-8")).hexdigest()[:12]


def _run_row(ctx: CheckContext, check: str, lam: float, tolerance: float, metrics: CheckMetrics) -> CheckReport:
    name = ctx.scenario.name
    started = time.perf_counter()
    try:
        outcome = CHECKS[check](ctx, lam)
        report = CheckReport.from_measurement(
            scenario=name,
            check=check,
            lam=lam,
            r_or_interval=outcome.label,
            measured=outcome.measured,
            expected=outcome.expected,
            tolerance=tolerance,
        )
    except LabError as e:
        report = _skip(ctx, check, lam, tolerance, e.reason_code)
        logger.warning(
            "check skipped",
            extra={"incident_id": report.incident_id, "scenario": name, "check": check, "lam": lam, "error": e.to_dict()},
        )
    except Exception as e:
        report = _skip(ctx, check, lam, tolerance, INTERNAL_ERROR)
        logger.exception(
            f"check crashed: {type(e).__name__}",
            extra={"incident_id": report.incident_id, "scenario": name, "check": check, "lam": lam},
        )
    metrics.record(check, report.status.value, time.perf_counter() - started, report.reason)
    return report


def _skip(ctx: CheckContext, check: str, lam: float, tolerance: float, reason: str) -> CheckReport:
    return CheckReport.skipped(
        scenario=ctx.scenario.name,
        check=check,
        lam=lam,
        r_or_interval=default_label(ctx, check),
        tolerance=tolerance,
        reason=reason,
        incident_id=incident_id(ctx.scenario.name, check, format(lam, ".17g")),
    )


def _tasks(scenarios: Sequence[Scenario]) -> List[Tuple[CheckContext, str, float, float]]:
    tasks = []
    for scenario in scenarios:
        ctx = CheckContext.from_scenario(scenario)
        for check in scenario.checks:
            tolerance = scenario.tolerances.get(check, CheckTolerances.get(check))
            for lam in sorted(set(scenario.lambda_grid)):
                tasks.append((ctx, check, lam, tolerance))
    return tasks


def run_scenarios(
    scenarios: Sequence[Scenario],
    *,
    out_dir: Optional[Union[str, Path]] = None,
    stem: Optional[str] = None,
    jobs: Optional[int] = None,
) -> ScenarioRun:
    """Run every (check, λ) row of ``scenarios``; write reports when ``out_dir`` is given."""
    current = get_settings()
    jobs = jobs or current.JOBS
    run_id = make_run_id(scenarios, current.SEED)
    token = run_id_var.set(run_id)
    metrics = CheckMetrics()
    metrics.scenarios.set(len(scenarios))
    try:
        tasks = _tasks(scenarios)
        logger.info("run started", extra={"scenarios": len(scenarios), "rows": len(tasks), "jobs": jobs})
        if jobs > 1 and len(tasks) > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                # each row runs in a copy of this context so the run id follows it
                futures = [
                    pool.submit(contextvars.copy_context().run, _run_row, *task, metrics) for task in tasks
                ]
                reports = [future.result() for future in futures]
        else:
            reports = [_run_row(*task, metrics) for task in tasks]

        reports.sort(key=lambda r: r.sort_key)
        summary = RunSummary.from_reports(run_id, [s.name for s in scenarios], reports)
        run = ScenarioRun(reports=reports, summary=summary)

        if out_dir is not None:
            stem = stem or (scenarios[0].name if len(scenarios) == 1 else "corpus")
            run.paths = write_reports(Path(out_dir), stem, reports, summary)
            if current.METRICS_ENABLED:
                run.paths.append(metrics.write(Path(out_dir)))
            MLflowService().log_run(
                summary,
                params={"scenarios": ",".join(summary.scenarios), "seed": current.SEED, "jobs": jobs},
                artifacts=run.paths,
            )

        logger.info(
            "run finished",
            extra={
                "passed": summary.passed,
                "failed": summary.failed,
                "skipped": summary.skipped,
                "exit_code": summary.exit_code,
            },
        )
        return run
    finally:
        run_id_var.reset(token)


def run_scenario(
    scenario: Scenario,
    *,
    out_dir: Optional[Union[str, Path]] = None,
    jobs: Optional[int] = None,
) -> ScenarioRun:
    """One CheckReport per (check, λ); exit code 0 iff no row failed."""
    return run_scenarios([scenario], out_dir=out_dir, jobs=jobs)


# =============================================================================
# PHASE TRACES
# =============================================================================


def trace_rows(scenario: Scenario, samples: int) -> List[Tuple[float, float, float, float, float]]:
    """θ₁ with its Lorentzian and finite-difference derivatives at ``samples`` couplings per λ.

    λ values whose interval contains a real resonance point are left out.
    """
    if samples < 2:
        raise ValueError("a trace needs at least 2 samples")
    a, b = scenario.interval
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise ScenarioConfigError("traces need a finite interval with a < b", location="interval")
    F = CheckContext.from_scenario(scenario).rank_one_model()
    couplings = np.linspace(a, b, samples)

    rows = []
    for lam in sorted(set(scenario.lambda_grid)):
        try:
            point = rank_one.resonance_point(F, lam)
            trace = rank_one.phase_trace(F, lam, a, b, include=couplings)
            for r in couplings:
                rows.append(
                    (
                        lam,
                        float(r),
                        trace.at(float(r)),
                        rank_one.phase_derivative(point, float(r)),
                        rank_one.phase_derivative_fd(F, lam, float(r)),
                    )
                )
        except LabError as e:
            logger.warning("trace skipped", extra={"lam": lam, "reason": e.reason_code})
    return rows


def export_trace(scenario: Scenario, samples: int, out_dir: Union[str, Path]) -> Path:
    path = Path(out_dir) / f"trace_{scenario.name}.csv"
    rows = trace_rows(scenario, samples)
    write_trace_csv(path, rows)
    logger.info("trace written", extra={"path": str(path), "rows": len(rows)})
    return path
