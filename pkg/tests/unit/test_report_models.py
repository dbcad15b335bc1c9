"""Tests for report rows, summaries and their files."""

import pytest

from resonance_lab.metrics.check_metrics import CheckMetrics
from resonance_lab.models.report_models import CheckReport, CheckStatus, RunSummary, format_float, format_interval
from resonance_lab.services.mlflow_service import MLflowService
from resonance_lab.services.report_writer import csv_row


def _row(measured, expected=0.0, tolerance=1e-8, lam=0.0, check="ssf"):
    return CheckReport.from_measurement(
        scenario="s", check=check, lam=lam, r_or_interval="[0,1]", measured=measured, expected=expected, tolerance=tolerance
    )


def test_float_formatting():
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(-2.0) == "-2"
    assert format_interval(0.0, float("inf")) == "[0,inf]"


@pytest.mark.parametrize(
    "measured, status",
    [(1e-9, CheckStatus.PASS), (1e-8, CheckStatus.PASS), (2e-8, CheckStatus.FAIL), (float("nan"), CheckStatus.FAIL)],
)
def test_status_from_gap(measured, status):
    assert _row(measured).status is status


def test_skipped_row_in_csv():
    row = CheckReport.skipped(
        scenario="s", check="eq1", lam=0.5, r_or_interval="", tolerance=1e-6, reason="NOT_APPLICABLE", incident_id="inc_x"
    )
    assert csv_row(row) == ["s", "eq1", "0.5", "", "", "", "9.9999999999999995e-07", "skipped", "NOT_APPLICABLE"]


def test_lambda_alias():
    row = _row(0.0, lam=0.25)
    assert row.model_dump(by_alias=True)["lambda"] == 0.25
    assert CheckReport.model_validate(row.model_dump(by_alias=True)) == row


def test_summary_counts():
    reports = [
        _row(0.0),
        _row(1.0),
        CheckReport.skipped(scenario="s", check="eq1", lam=0.0, tolerance=0.0, r_or_interval="", reason="SINGULARITY"),
    ]
    summary = RunSummary.from_reports("run_x", ["s"], reports)
    assert (summary.passed, summary.failed, summary.skipped) == (1, 1, 1)
    assert summary.skipped_by_reason == {"SINGULARITY": 1}
    assert summary.exit_code == 1


def test_metrics_registry_is_per_run(tmp_path):
    first, second = CheckMetrics(), CheckMetrics()
    first.record("eq1", "skipped", 0.01, "NOT_APPLICABLE")
    text = first.write(tmp_path).read_text()
    assert 'lab_check_skips_total{reason="NOT_APPLICABLE"} 1.0' in text
    assert second.registry.get_sample_value("lab_check_outcomes_total", {"check": "eq1", "status": "skipped"}) is None


def test_mlflow_disabled_without_uri():
    service = MLflowService()
    assert not service.enabled
    assert service.log_run(RunSummary(run_id="run_x", scenarios=[]), params={}) is False


def test_mlflow_logs_run(mocker, tmp_path):
    mlflow = mocker.patch("resonance_lab.services.mlflow_service.mlflow")
    service = MLflowService(tracking_uri="http://tracking:5000", experiment_name="lab")
    summary = RunSummary(run_id="run_x", scenarios=["s"], passed=2)
    assert service.log_run(summary, params={"seed": 0}, artifacts=[tmp_path / "s.csv"]) is True
    mlflow.start_run.assert_called_once_with(run_name="run_x")
    mlflow.log_metrics.assert_called_once_with({"checks_passed": 2, "checks_failed": 0, "checks_skipped": 0})
    mlflow.log_artifact.assert_called_once_with(str(tmp_path / "s.csv"))


def test_mlflow_failures_are_swallowed(mocker):
    mlflow = mocker.patch("resonance_lab.services.mlflow_service.mlflow")
    mlflow.start_run.side_effect = RuntimeError("tracking server down")
    service = MLflowService(tracking_uri="http://tracking:5000")
    assert service.log_run(RunSummary(run_id="run_x", scenarios=[]), params={}) is False
