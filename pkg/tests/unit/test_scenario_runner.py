"""Tests for running scenarios and writing reports."""

import csv
import json

import pytest

from resonance_lab.models.report_models import CSV_COLUMNS, CheckStatus
from resonance_lab.models.scenario_models import Scenario
from resonance_lab.services import check_suite
from resonance_lab.services.check_suite import CheckOutcome
from resonance_lab.services.scenario_runner import (
    export_trace,
    make_run_id,
    run_scenario,
    run_scenarios,
    trace_rows,
)
from resonance_lab.utils.exceptions import ScenarioConfigError


def _scenario(**overrides):
    document = {
        "name": "cauchy_demo",
        "model": {"type": "cauchy"},
        "lambda_grid": [0.5, -0.5, 0.0],
        "interval": [-1.0, 1.0],
        "checks": ["lorentzian", "eq1", "ssf"],
    }
    document.update(overrides)
    return Scenario.model_validate(document)


def test_rows_are_sorted_and_pass():
    run = run_scenario(_scenario())
    keys = [(r.check, r.lam) for r in run.reports]
    assert keys == sorted(keys)
    assert len(run.reports) == 9
    assert all(r.status is CheckStatus.PASS for r in run.reports)
    assert run.exit_code == 0


def test_measure_zero_rows_are_skipped():
    scenario = _scenario(
        name="atoms",
        model={"type": "point_masses", "masses": [[0.0, 1.0], [2.0, 0.5]]},
        lambda_grid=[0.0, 1.0],
        checks=["total_variation"],
    )
    run = run_scenario(scenario)
    skipped, passed = run.reports
    assert skipped.status is CheckStatus.SKIPPED
    assert skipped.reason == "MEASURE_ZERO_POINT"
    assert skipped.incident_id.startswith("inc_")
    assert skipped.measured is None
    assert passed.status is CheckStatus.PASS
    assert run.summary.skipped_by_reason == {"MEASURE_ZERO_POINT": 1}
    assert run.exit_code == 0


def test_unexpected_errors_become_internal_error(monkeypatch):
    def boom(ctx, lam):
        raise RuntimeError("broken")

    monkeypatch.setitem(check_suite.CHECKS, "eq1", boom)
    run = run_scenario(_scenario(checks=["eq1"]))
    assert {r.reason for r in run.reports} == {"INTERNAL_ERROR"}
    assert run.exit_code == 0


def test_failed_row_sets_exit_code(monkeypatch):
    monkeypatch.setitem(check_suite.CHECKS, "eq1", lambda ctx, lam: CheckOutcome(1.0, 0.0, ""))
    run = run_scenario(_scenario(checks=["eq1"]))
    assert run.summary.failed == 3
    assert run.exit_code == 1


def test_tolerance_override():
    run = run_scenario(_scenario(checks=["eq1"], tolerances={"eq1": 0.5}))
    assert {r.tolerance for r in run.reports} == {0.5}


def test_run_id_is_deterministic():
    assert make_run_id([_scenario()], 0) == make_run_id([_scenario()], 0)
    assert make_run_id([_scenario()], 0) != make_run_id([_scenario()], 1)
    assert run_scenario(_scenario()).summary.run_id == make_run_id([_scenario()], 0)


def test_thread_pool_gives_identical_reports():
    scenarios = [_scenario(), _scenario(name="semicircle_demo", model={"type": "semicircle"})]
    serial = run_scenarios(scenarios, jobs=1)
    parallel = run_scenarios(scenarios, jobs=4)
    assert serial.reports == parallel.reports


def test_reports_written(tmp_path):
    out = tmp_path / "out"
    run = run_scenario(_scenario(), out_dir=out)
    assert sorted(p.name for p in run.paths) == ["cauchy_demo.csv", "cauchy_demo.json", "metrics.prom"]

    with open(out / "cauchy_demo.csv", newline="") as handle:
        rows = list(csv.reader(handle))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 10
    assert rows[1][:4] == ["cauchy_demo", "eq1", "-0.5", "-0.5"]

    payload = json.loads((out / "cauchy_demo.json").read_text())
    assert payload["summary"]["passed"] == 9
    assert payload["rows"][0]["lambda"] == -0.5

    assert 'lab_check_outcomes_total{check="eq1",status="pass"} 3.0' in (out / "metrics.prom").read_text()


def test_metrics_can_be_disabled(tmp_path, monkeypatch):
    from resonance_lab.config.settings import get_settings

    monkeypatch.setenv("LAB_METRICS_ENABLED", "false")
    get_settings.cache_clear()
    run = run_scenario(_scenario(), out_dir=tmp_path)
    assert "metrics.prom" not in [p.name for p in run.paths]


def test_trace_rows():
    rows = trace_rows(_scenario(lambda_grid=[0.0]), samples=5)
    assert [r[1] for r in rows] == [-1.0, -0.5, 0.0, 0.5, 1.0]
    lam, r, theta, lorentzian, fd = rows[-1]
    assert theta == pytest.approx(-0.5 * 3.141592653589793, abs=1e-12)
    assert lorentzian == pytest.approx(-1.0)
    assert fd == pytest.approx(lorentzian, abs=1e-6)


def test_trace_rows_skip_real_resonance():
    scenario = _scenario(model={"type": "uniform"}, lambda_grid=[0.5, 2.0], interval=[0.0, 2.0])
    assert {r[0] for r in trace_rows(scenario, samples=3)} == {0.5}


def test_trace_needs_finite_interval():
    with pytest.raises(ScenarioConfigError):
        trace_rows(_scenario(interval=[0.0, 0.0]), samples=3)


def test_export_trace(tmp_path):
    path = export_trace(_scenario(lambda_grid=[0.0]), 3, tmp_path)
    assert path.name == "trace_cauchy_demo.csv"
    assert path.read_text().splitlines()[0] == "lambda,r,theta,theta_prime_lorentzian,theta_prime_fd"
