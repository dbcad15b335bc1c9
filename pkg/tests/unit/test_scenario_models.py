"""Tests for scenario documents and their loading."""

import json

import pytest
from pydantic import ValidationError

from resonance_lab.models.scenario_models import Scenario
from resonance_lab.services.herglotz_models import Cauchy, MatrixHerglotzModel, NonnegCombination
from resonance_lab.services.scenario_runner import load_scenario, parse_scenario
from resonance_lab.utils.exceptions import ScenarioConfigError


def _document(**overrides):
    document = {
        "name": "example",
        "model": {"type": "cauchy"},
        "lambda_grid": [0.0],
        "checks": ["eq1"],
    }
    document.update(overrides)
    return document


def test_minimal_document_defaults():
    scenario = Scenario.model_validate(_document())
    assert scenario.interval == (0.0, 1.0)
    assert scenario.pointwise_coupling == 0.5
    assert not scenario.is_matrix
    assert scenario.model.to_model() == Cauchy()


def test_checks_are_deduplicated_and_sorted():
    scenario = Scenario.model_validate(_document(checks=["ssf", "eq1", "ssf"]))
    assert scenario.checks == ["eq1", "ssf"]


def test_explicit_coupling():
    assert Scenario.model_validate(_document(coupling=-0.25)).pointwise_coupling == -0.25


def test_combination_document():
    scenario = Scenario.model_validate(
        _document(
            model={
                "type": "combination",
                "terms": [
                    {"weight": 0.5, "model": {"type": "semicircle", "halfwidth": 1.0}},
                    {"weight": 0.0, "model": {"type": "uniform", "a": -1.0, "b": 1.0}},
                ],
            }
        )
    )
    assert isinstance(scenario.model.to_model(), NonnegCombination)


def test_matrix_document_with_complex_entries():
    scenario = Scenario.model_validate(
        _document(
            model={
                "type": "matrix",
                "J": [1, -1],
                "terms": [{"C": [[1.0, [0.0, 0.2]], [[0.0, -0.2], 1.0]], "model": {"type": "cauchy"}}],
            }
        )
    )
    model = scenario.model.to_model()
    assert scenario.is_matrix
    assert isinstance(model, MatrixHerglotzModel)
    assert model.terms[0][0][0, 1] == 0.2j


@pytest.mark.parametrize(
    "overrides, fragment",
    [
        ({"model": {"type": "matrix", "J": [2], "terms": [{"C": [[1.0]], "model": {"type": "cauchy"}}]}}, "±1"),
        ({"model": {"type": "cauchy", "scale": 0.0}}, "scale"),
        ({"model": {"type": "uniform", "a": 1.0, "b": 0.0}}, "a < b"),
        ({"model": {"type": "point_masses", "masses": [[0.0, -1.0]]}}, "positive"),
        ({"model": {"type": "gaussian"}}, "type"),
        ({"checks": ["eq9"]}, "checks"),
        ({"interval": [1.0, 0.0]}, "a <= b"),
        ({"tolerances": {"eq1": -1.0}}, "non-negative"),
        ({"lambda_grid": []}, "lambda_grid"),
        ({"name": "has space"}, "name"),
        ({"extra_field": 1}, "extra_field"),
    ],
)
def test_invalid_documents(overrides, fragment):
    with pytest.raises(ValidationError) as info:
        Scenario.model_validate(_document(**overrides))
    assert fragment in str(info.value)


def test_non_hermitian_matrix_is_rejected():
    document = _document(
        model={"type": "matrix", "J": [1, 1], "terms": [{"C": [[1.0, 0.5], [0.0, 1.0]], "model": {"type": "cauchy"}}]}
    )
    with pytest.raises(ValidationError, match="Hermitian"):
        Scenario.model_validate(document)


def test_parse_scenario_reports_json_position():
    with pytest.raises(ScenarioConfigError) as info:
        parse_scenario('{\n  "name": "x",\n  oops\n}', source="broken.json")
    assert "broken.json: line 3" in str(info.value)
    assert info.value.reason_code == "CONFIG_ERROR"


def test_parse_scenario_reports_field_location():
    document = _document(model={"type": "matrix", "J": [1, 0], "terms": []})
    with pytest.raises(ScenarioConfigError) as info:
        parse_scenario(json.dumps(document))
    assert info.value.location.startswith("model.matrix")


def test_load_scenario_missing_file(tmp_path):
    with pytest.raises(ScenarioConfigError, match="cannot read scenario"):
        load_scenario(tmp_path / "nope.json")


def test_load_scenario_from_disk(write_scenario):
    scenario = load_scenario(write_scenario(_document(name="on_disk")))
    assert scenario.name == "on_disk"


def test_matrix_document_round_trips_to_boundary_matrix():
    from resonance_lab.services.herglotz_models import eval_matrix_boundary

    scenario = Scenario.model_validate(
        _document(
            model={
                "type": "matrix",
                "J": [1, 1],
                "terms": [
                    {"C": [[1.0, 0.0], [0.0, 0.0]], "model": {"type": "cauchy"}},
                    {"C": [[0.0, 0.0], [0.0, 1.0]], "model": {"type": "semicircle", "halfwidth": 2.0}},
                ],
            }
        )
    )
    A = eval_matrix_boundary(scenario.model.to_model(), 1.0)
    assert A.shape == (2, 2)
    assert A[0, 0] == pytest.approx((-1 + 1j) / 2)
    assert A[1, 1] == pytest.approx((-1 + 1j * 3**0.5) / 2)
    assert A[0, 1] == 0
