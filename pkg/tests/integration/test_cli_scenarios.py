"""End-to-end runs of the ``lab`` command."""

from importlib import resources
from pathlib import Path

import pytest

from resonance_lab.main import main
from resonance_lab.services.corpus import SCENARIO_PACKAGE

BUNDLED = Path(str(resources.files(SCENARIO_PACKAGE)))


def _cauchy_document(**overrides):
    document = {
        "name": "cli_cauchy",
        "model": {"type": "cauchy"},
        "lambda_grid": [0.0, 0.5],
        "interval": [0.0, 1.0],
        "checks": ["eq1", "eq2", "ssf", "pushnitski"],
    }
    document.update(overrides)
    return document


def test_run_passing_scenario(write_scenario, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", str(write_scenario(_cauchy_document())), "--out", str(out)]) == 0
    assert (out / "cli_cauchy.csv").exists()
    assert (out / "cli_cauchy.json").exists()
    assert "8 passed, 0 failed, 0 skipped" in capsys.readouterr().out


def test_run_failing_scenario(write_scenario, tmp_path):
    # a zero tolerance cannot absorb the finite-difference error
    document = _cauchy_document(checks=["eq1"], tolerances={"eq1": 0.0}, lambda_grid=[0.25])
    assert main(["run", str(write_scenario(document)), "--out", str(tmp_path)]) == 1


@pytest.mark.parametrize(
    "text",
    [
        '{"name": "bad", "model": {"type": "matrix", "J": [2], "terms": []}, "lambda_grid": [0], "checks": ["eq2"]}',
        '{"name": "bad", "model": {"type": "cauchy"}, "lambda_grid": [0], "checks": ["eq9"]}',
        '{"name": "bad", "model": {"type": "cauchy"}, "lambda_grid": [0], "interval": [1, 0], "checks": ["eq1"]}',
        '{"name": "bad",',
    ],
)
def test_run_config_errors(write_scenario, text, capsys):
    assert main(["run", str(write_scenario(text))]) == 2
    assert "error:" in capsys.readouterr().err


def test_missing_scenario_file(tmp_path):
    assert main(["run", str(tmp_path / "missing.json")]) == 2


def test_invalid_jobs(write_scenario):
    assert main(["run", str(write_scenario(_cauchy_document())), "--jobs", "0"]) == 2


def test_unknown_subcommand():
    with pytest.raises(SystemExit) as info:
        main(["plot"])
    assert info.value.code == 2


def test_invalid_environment(monkeypatch, write_scenario):
    from resonance_lab.config.settings import get_settings

    monkeypatch.setenv("LAB_JOBS", "many")
    get_settings.cache_clear()
    with pytest.raises(SystemExit) as info:
        main(["run", str(write_scenario(_cauchy_document()))])
    assert info.value.code == 2


def test_reports_are_byte_identical(write_scenario, tmp_path):
    path = str(write_scenario(_cauchy_document()))
    main(["run", path, "--out", str(tmp_path / "a")])
    main(["run", path, "--out", str(tmp_path / "b"), "--jobs", "2"])
    for name in ("cli_cauchy.csv", "cli_cauchy.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_default_out_dir_from_environment(write_scenario, tmp_path):
    assert main(["run", str(write_scenario(_cauchy_document()))]) == 0
    assert (tmp_path / "reports" / "cli_cauchy.csv").exists()


@pytest.mark.parametrize("name", sorted(p.name for p in BUNDLED.glob("*.json")))
def test_bundled_scenarios_pass(name, tmp_path):
    assert main(["run", str(BUNDLED / name), "--out", str(tmp_path)]) == 0


def test_trace_command(write_scenario, tmp_path, capsys):
    path = write_scenario(_cauchy_document(lambda_grid=[0.0]))
    assert main(["trace", str(path), "--check", "lorentzian", "--samples", "11", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "trace_cli_cauchy.csv").read_text().splitlines()
    assert len(lines) == 12
    assert capsys.readouterr().out.strip().endswith("trace_cli_cauchy.csv")


def test_trace_rejects_matrix_models(tmp_path):
    assert main(["trace", str(BUNDLED / "matrix_two_by_two.json"), "--out", str(tmp_path)]) == 2


@pytest.mark.slow
def test_corpus_run(tmp_path, monkeypatch):
    from resonance_lab.config.settings import get_settings

    monkeypatch.setenv("LAB_CORPUS_SIZE", "4")
    get_settings.cache_clear()
    assert main(["corpus", "--out", str(tmp_path), "--jobs", "2"]) == 0
    assert (tmp_path / "corpus.csv").exists()
    assert (tmp_path / "metrics.prom").exists()
