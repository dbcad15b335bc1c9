"""Tests for the Herglotz model catalog."""

import math

import numpy as np
import pytest

from resonance_lab.services.herglotz_models import (
    Cauchy,
    MatrixHerglotzModel,
    NonnegCombination,
    PointMasses,
    Semicircle,
    Uniform,
    eval_boundary_scalar,
    eval_matrix,
    eval_matrix_boundary,
    eval_scalar,
    herglotz_selfcheck,
    matrix_herglotz_selfcheck,
    matrix_imaginary_part_min,
    oracle_scalar,
    upper_half_plane_samples,
)
from resonance_lab.utils.exceptions import BoundaryEvaluationRequiredError, MeasureZeroPointError


def test_eval_scalar_examples(cauchy, uniform):
    assert eval_scalar(cauchy, 1j) == pytest.approx(0.5j, abs=1e-15)
    assert eval_scalar(uniform, 2.0) == pytest.approx(-math.log(2.0), abs=1e-15)
    assert eval_scalar(PointMasses(((5.0, 1.0),)), 1j) == pytest.approx((5 + 1j) / 26, abs=1e-15)


@pytest.mark.parametrize("model", [Cauchy(), Semicircle(), Uniform()])
def test_eval_scalar_on_support_needs_boundary_evaluation(model):
    with pytest.raises(BoundaryEvaluationRequiredError):
        eval_scalar(model, 0.5)


def test_eval_boundary_scalar_examples(cauchy, semicircle):
    assert eval_boundary_scalar(cauchy, 0.0) == pytest.approx(1j, abs=1e-15)
    assert eval_boundary_scalar(semicircle, 0.0) == pytest.approx(1j, abs=1e-15)
    outside = eval_boundary_scalar(semicircle, 3.0)
    assert outside.imag == 0.0
    assert outside.real == pytest.approx((-3 + math.sqrt(5)) / 2, abs=1e-15)


def test_semicircle_decays_on_both_sides(semicircle):
    assert abs(eval_boundary_scalar(semicircle, -50.0)) < 0.05
    assert abs(eval_boundary_scalar(semicircle, 50.0)) < 0.05


def test_uniform_boundary_on_support(uniform):
    value = eval_boundary_scalar(uniform, 0.25)
    assert value.real == pytest.approx(math.log(3.0))
    assert value.imag == pytest.approx(math.pi)


@pytest.mark.parametrize(
    "model, lam",
    [
        (PointMasses(((0.0, 1.0),)), 0.0),
        (Uniform(0.0, 1.0), 1.0),
        (Semicircle(2.0), -2.0),
    ],
)
def test_excluded_points_raise_measure_zero(model, lam):
    with pytest.raises(MeasureZeroPointError) as info:
        eval_boundary_scalar(model, lam)
    assert info.value.reason_code == "MEASURE_ZERO_POINT"


@pytest.mark.parametrize(
    "model, lam",
    [
        (Cauchy(center=0.5, scale=0.7, mass=2.0), 0.1),
        (Semicircle(3.0), 1.0),
        (Uniform(-1.0, 2.0), 0.3),
        (Uniform(-1.0, 2.0), 5.0),
    ],
)
def test_extrapolated_boundary_matches_closed_form(model, lam):
    closed = eval_boundary_scalar(model, lam)
    extrapolated = eval_boundary_scalar(model, lam, method="extrapolate")
    assert abs(closed - extrapolated) <= 1e-6 * (1 + abs(closed))


def test_unknown_boundary_method(cauchy):
    with pytest.raises(ValueError):
        eval_boundary_scalar(cauchy, 0.0, method="guess")


@pytest.mark.parametrize(
    "model",
    [
        Cauchy(center=-1.0, scale=0.5),
        Semicircle(2.0),
        Uniform(0.0, 1.0),
        NonnegCombination(((0.3, Cauchy()), (0.7, Uniform(-1.0, 1.0)))),
    ],
)
def test_oracle_agrees_with_closed_form(model):
    for z in (1j, 0.5 + 0.1j, -2 + 3j):
        assert abs(oracle_scalar(model, z) - eval_scalar(model, z)) <= 1e-8


def test_herglotz_selfcheck_examples(cauchy, uniform):
    assert herglotz_selfcheck(cauchy, [1j, 1 + 1j, -2 + 0.5j]).passed
    combination = NonnegCombination(((0.5, cauchy), (0.5, uniform)))
    assert herglotz_selfcheck(combination, [1j, 1 + 1j, -2 + 0.5j]).passed
    report = herglotz_selfcheck(PointMasses(((0.0, 1.0),)), [1j])
    assert report.passed
    assert report.items[0].value == pytest.approx(1.0)


def test_herglotz_selfcheck_random_samples():
    samples = upper_half_plane_samples(np.random.default_rng(0), 12)
    assert np.all(samples.imag > 0)
    assert herglotz_selfcheck(Semicircle(1.5, mass=2.0), samples).passed


@pytest.mark.parametrize(
    "model",
    [
        Cauchy(),
        Cauchy(center=-1.0, scale=0.5, mass=2.0),
        Semicircle(2.0),
        Uniform(0.0, 1.0),
        PointMasses(((-1.0, 0.5), (0.0, 1.0), (2.5, 0.25))),
        NonnegCombination(((0.3, Cauchy()), (0.7, Uniform(-1.0, 1.0)), (0.0, Semicircle()))),
    ],
)
def test_imaginary_part_is_non_negative_on_random_samples(model):
    samples = upper_half_plane_samples(np.random.default_rng(1234), 1000)
    values = np.array([eval_scalar(model, z) for z in samples])
    assert np.all(values.imag >= 0.0)


def test_combination_is_linear_in_its_terms():
    terms = ((0.3, Cauchy(center=0.5)), (1.7, Semicircle(1.5)), (0.0, Uniform(-1.0, 2.0)))
    combination = NonnegCombination(terms)
    for z in upper_half_plane_samples(np.random.default_rng(5), 50):
        expected = sum(w * eval_scalar(m, z) for w, m in terms)
        assert abs(eval_scalar(combination, z) - expected) <= 1e-12 * max(1.0, abs(expected))


def test_herglotz_selfcheck_rejects_lower_half_plane(cauchy):
    with pytest.raises(ValueError):
        herglotz_selfcheck(cauchy, [1 - 1j])


def test_model_parameter_validation():
    with pytest.raises(ValueError):
        Cauchy(scale=0.0)
    with pytest.raises(ValueError):
        Uniform(a=1.0, b=1.0)
    with pytest.raises(ValueError):
        PointMasses(((0.0, -1.0),))
    with pytest.raises(ValueError):
        NonnegCombination(((-0.5, Cauchy()),))


# =============================================================================
# MATRIX MODELS
# =============================================================================


def test_matrix_boundary_reduces_to_scalar(cauchy):
    model = MatrixHerglotzModel.from_scalar(cauchy)
    np.testing.assert_allclose(eval_matrix_boundary(model, 0.0), [[1j]], atol=1e-15)


def test_matrix_boundary_is_componentwise(diagonal_terms):
    positive = MatrixHerglotzModel(J=(1, 1), terms=diagonal_terms)
    mixed = MatrixHerglotzModel(J=(1, -1), terms=diagonal_terms)
    np.testing.assert_allclose(eval_matrix_boundary(positive, 0.0), np.diag([1j, 1j]), atol=1e-15)
    np.testing.assert_allclose(eval_matrix_boundary(mixed, 0.0), np.diag([1j, -1j]), atol=1e-15)


def test_eval_matrix_off_axis(coupled_matrix_model, cauchy, semicircle):
    z = 0.3 + 0.2j
    expected = np.array([[1.0, 0.3], [0.3, 0.5]]) * eval_scalar(cauchy, z) + np.diag([0.5, 1.0]) * eval_scalar(
        semicircle, z
    )
    np.testing.assert_allclose(eval_matrix(coupled_matrix_model, z), expected, atol=1e-15)


def test_matrix_model_validation(cauchy):
    with pytest.raises(ValueError, match="signature entries must be ±1"):
        MatrixHerglotzModel(J=(2,), terms=((np.eye(1), cauchy),))
    with pytest.raises(ValueError, match="Hermitian"):
        MatrixHerglotzModel(J=(1, 1), terms=((np.array([[1.0, 0.5], [0.0, 1.0]]), cauchy),))
    with pytest.raises(ValueError, match="positive semidefinite"):
        MatrixHerglotzModel(J=(1, 1), terms=((np.array([[1.0, 2.0], [2.0, 1.0]]), cauchy),))
    with pytest.raises(ValueError, match="shape"):
        MatrixHerglotzModel(J=(1, 1), terms=((np.eye(3), cauchy),))


def test_matrix_excluded_points_propagate(cauchy):
    model = MatrixHerglotzModel(
        J=(1, -1),
        terms=((np.diag([1.0, 0.0]), cauchy), (np.diag([0.0, 1.0]), Uniform(0.0, 1.0))),
    )
    assert model.excluded_points() == (0.0, 1.0)
    with pytest.raises(MeasureZeroPointError):
        eval_matrix_boundary(model, 1.0)


def test_matrix_selfcheck_passes_for_indefinite_signature(coupled_matrix_model):
    samples = [1j, 0.5 + 0.1j, -1 + 2j]
    assert matrix_herglotz_selfcheck(coupled_matrix_model, samples).passed


def test_matrix_imaginary_part_is_positive_semidefinite_on_random_samples(coupled_matrix_model, cauchy):
    mixed = MatrixHerglotzModel(
        J=(1, -1, 1),
        terms=(
            (np.array([[2.0, 0.5, 0.1], [0.5, 1.0, 0.2], [0.1, 0.2, 0.5]]), cauchy),
            (np.diag([0.0, 1.0, 3.0]), Uniform(-1.0, 1.0)),
        ),
    )
    samples = upper_half_plane_samples(np.random.default_rng(9), 200)
    for model in (coupled_matrix_model, mixed):
        assert min(matrix_imaginary_part_min(model, z) for z in samples) >= -1e-12
