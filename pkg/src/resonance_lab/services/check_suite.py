"""Scenario check names mapped to engine operations.

Each check turns one (model, λ) pair into a measured value, an expected
value and a coupling label. Pass/fail is decided by the runner against the
scenario tolerance; checks that report a set of conditions measure the
number of violated conditions against an expected 0.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from resonance_lab.models.report_models import format_float, format_interval
from resonance_lab.models.scenario_models import MatrixSpec, Scenario
from resonance_lab.services import finite_rank_engine as finite_rank
from resonance_lab.services import rank_one_engine as rank_one
from resonance_lab.services.herglotz_models import (
    MatrixHerglotzModel,
    NonnegCombination,
    ScalarHerglotzModel,
    herglotz_selfcheck,
    matrix_herglotz_selfcheck,
)
from resonance_lab.utils.exceptions import NotApplicableError

logger = logging.getLogger(__name__)

SELF_CHECK_HEIGHTS = (1e-2, 1e-1, 1.0, 10.0)


@dataclass(frozen=True)
class CheckOutcome:
    measured: float
    expected: float
    label: str


@dataclass(frozen=True, eq=False)
class CheckContext:
    """Numerical models of one scenario, built once."""

    scenario: Scenario
    matrix: MatrixHerglotzModel
    scalar: Optional[ScalarHerglotzModel]

    @classmethod
    def from_scenario(cls, scenario: Scenario) -> "CheckContext":
        built = scenario.model.to_model()
        if isinstance(scenario.model, MatrixSpec):
            return cls(scenario=scenario, matrix=built, scalar=_scalar_reduction(built))
        return cls(scenario=scenario, matrix=MatrixHerglotzModel.from_scalar(built), scalar=built)

    @property
    def interval(self) -> Tuple[float, float]:
        return self.scenario.interval

    def rank_one_model(self) -> ScalarHerglotzModel:
        if self.scalar is None:
            raise NotApplicableError(
                "rank-one checks need a scalar model or a k=1 matrix model with J=+1",
                scenario=self.scenario.name,
            )
        return self.scalar


def _scalar_reduction(model: MatrixHerglotzModel) -> Optional[ScalarHerglotzModel]:
    """``Σ c_m F_m`` for a k=1 model with positive signature, else None."""
    if model.k != 1 or model.J != (1,):
        return None
    terms = tuple((float(C[0, 0].real), m) for C, m in model.terms)
    if not any(w > 0 for w, _ in terms):
        return None
    if len(terms) == 1 and terms[0][0] == 1.0:
        return terms[0][1]
    return NonnegCombination(terms=terms)


# =============================================================================
# RANK ONE
# =============================================================================


def check_eq1(ctx: CheckContext, lam: float) -> CheckOutcome:
    F = ctx.rank_one_model()
    alpha = rank_one.resonance_point(F, lam).alpha
    result = rank_one.breit_wigner_check(F, lam)
    return CheckOutcome(result.measured, result.expected, format_float(alpha))


def check_lorentzian(ctx: CheckContext, lam: float) -> CheckOutcome:
    r = ctx.scenario.pointwise_coupling
    result = rank_one.lorentzian_check(ctx.rank_one_model(), lam, r)
    return CheckOutcome(result.measured, result.expected, format_float(r))


def check_trace_identity(ctx: CheckContext, lam: float) -> CheckOutcome:
    r = ctx.scenario.pointwise_coupling
    result = rank_one.trace_identity_check(ctx.rank_one_model(), lam, r)
    return CheckOutcome(result.measured, result.expected, format_float(r))


def check_total_variation(ctx: CheckContext, lam: float) -> CheckOutcome:
    F = ctx.rank_one_model()
    measured = rank_one.total_phase_variation(F, lam)
    point = rank_one.resonance_point(F, lam)
    if point.is_real:
        expected = 0.0
    else:
        expected = -2.0 * math.pi * rank_one.ssf_ac(F, lam, -math.inf, math.inf)
    return CheckOutcome(measured, expected, format_interval(-math.inf, math.inf))


def check_pushnitski(ctx: CheckContext, lam: float) -> CheckOutcome:
    a, b = ctx.interval
    result = rank_one.pushnitski_check(ctx.rank_one_model(), lam, a, b)
    return CheckOutcome(result.measured, result.expected, format_interval(a, b))


def check_phase_range(ctx: CheckContext, lam: float) -> CheckOutcome:
    a, b = ctx.interval
    result = rank_one.phase_range_check(ctx.rank_one_model(), lam, a, b)
    return CheckOutcome(0.0 if result.passed else 1.0, 0.0, format_interval(a, b))


def check_limiting_absorption(ctx: CheckContext, lam: float) -> CheckOutcome:
    F = ctx.rank_one_model()
    report = rank_one.limiting_absorption_check(F, lam)
    label = format_float(rank_one.resonance_point(F, lam).alpha)
    return CheckOutcome(0.0 if report.passed else 1.0, 0.0, label)


def check_continuation(ctx: CheckContext, lam: float) -> CheckOutcome:
    report = rank_one.continuation_pole_check(ctx.rank_one_model(), lam)
    violations = sum(m <= report.pole_bound for m in report.pole_moduli)
    violations += sum(m >= report.zero_bound for m in report.zero_moduli)
    violations += report.unitarity_gap > 1e-12
    return CheckOutcome(float(violations), 0.0, format_float(report.pole.real))


# =============================================================================
# FINITE RANK
# =============================================================================


def check_eq2(ctx: CheckContext, lam: float) -> CheckOutcome:
    a, b = ctx.interval
    result = finite_rank.eq2_check(ctx.matrix, lam, a, b)
    return CheckOutcome(result.measured, result.expected, format_interval(a, b))


def _interior_real_points(A: MatrixHerglotzModel, lam: float, a: float, b: float) -> List[float]:
    return sorted(p.alpha for p in finite_rank.resonance_set(A, lam).real_points() if a < p.alpha < b)


def _isolation_half_width(alpha: float, neighbours: List[float], a: float, b: float) -> float:
    """Half the distance from ``alpha`` to the interval ends and the other real points."""
    distances = [alpha - a, b - alpha] + [abs(alpha - other) for other in neighbours if other != alpha]
    return 0.5 * min(distances)


def check_ssf(ctx: CheckContext, lam: float) -> CheckOutcome:
    """ξ from the eigenvalue decomposition against ξ from the determinant phase above the axis."""
    a, b = ctx.interval
    decomposition = finite_rank.ssf_total(ctx.matrix, lam, a, b)
    expected = finite_rank.ssf_from_phase(ctx.matrix, lam, a, b)
    return CheckOutcome(decomposition.xi_total, expected, format_interval(a, b))


def check_resonance_index(ctx: CheckContext, lam: float) -> CheckOutcome:
    """Indices from converging resonance points against the jumps of the phase-path ξ."""
    a, b = ctx.interval
    points = _interior_real_points(ctx.matrix, lam, a, b)
    if not points:
        raise NotApplicableError(f"no real resonance point inside [{a}, {b}] at lambda={lam}", lam=lam)
    measured = sum(finite_rank.resonance_index(ctx.matrix, lam, alpha) for alpha in points)
    expected = sum(
        finite_rank.resonance_index_from_phase(ctx.matrix, lam, alpha, _isolation_half_width(alpha, points, a, b))
        for alpha in points
    )
    return CheckOutcome(float(measured), float(expected), ";".join(format_float(p) for p in points))


def check_factorization(ctx: CheckContext, lam: float) -> CheckOutcome:
    a, b = ctx.interval
    lo, hi = (a, b) if a < b and math.isfinite(a) and math.isfinite(b) else (-3.0, 3.0)
    result = finite_rank.determinant_factorization_check(ctx.matrix, lam, np.linspace(lo, hi, 10))
    return CheckOutcome(result.measured, result.expected, format_interval(lo, hi))


# =============================================================================
# MODELS
# =============================================================================


def check_herglotz(ctx: CheckContext, lam: float) -> CheckOutcome:
    samples = [complex(lam, y) for y in SELF_CHECK_HEIGHTS]
    samples += [complex(lam - 1.0, 0.5), complex(lam + 1.0, 0.5)]
    if ctx.scenario.is_matrix:
        report = matrix_herglotz_selfcheck(ctx.matrix, samples)
    else:
        report = herglotz_selfcheck(ctx.scalar, samples)
    return CheckOutcome(float(len(report.failures)), 0.0, "")


CHECKS: Dict[str, Callable[[CheckContext, float], CheckOutcome]] = {
    "continuation": check_continuation,
    "eq1": check_eq1,
    "eq2": check_eq2,
    "factorization": check_factorization,
    "herglotz": check_herglotz,
    "limiting_absorption": check_limiting_absorption,
    "lorentzian": check_lorentzian,
    "phase_range": check_phase_range,
    "pushnitski": check_pushnitski,
    "resonance_index": check_resonance_index,
    "ssf": check_ssf,
    "total_variation": check_total_variation,
    "trace_identity": check_trace_identity,
}


def default_label(ctx: CheckContext, check: str) -> str:
    """Coupling label for rows that never produced an outcome."""
    if check in {"lorentzian", "trace_identity"}:
        return format_float(ctx.scenario.pointwise_coupling)
    if check in {"eq1", "limiting_absorption", "continuation", "herglotz"}:
        return ""
    if check == "total_variation":
        return format_interval(-math.inf, math.inf)
    return format_interval(*ctx.interval)

