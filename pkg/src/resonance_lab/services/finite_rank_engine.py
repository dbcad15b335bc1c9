"""Finite-rank perturbations ``V = F*JF``.

Everything is driven by the k x k boundary matrix ``A(λ+i0) = J·Σ C_m F_m(λ+i0)``.
Resonance points are ``r_j = -1/a_j`` over its nonzero eigenvalues ``a_j``.
The phase sum on the left of the sum rule comes from the unwrapped
argument of ``det(1 + sA)``, computed by LU and never through eigenvalues,
so the two sides of the rule are independent numerical paths.
"""

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from resonance_lab.config.settings import NumericsConfig
from resonance_lab.services.coupling_grid import refine_coupling_grid
from resonance_lab.services.herglotz_models import (
    MatrixHerglotzModel,
    eval_matrix,
    eval_matrix_boundary,
)
from resonance_lab.services.numerics_core import (
    boundary_extrapolate,
    log_derivative_trace,
    lu_determinant,
    small_eigenvalues,
    unwrap_phase,
)
from resonance_lab.services.rank_one_engine import IdentityResidual, ResonancePoint
from resonance_lab.utils.exceptions import (
    EndpointAmbiguityError,
    IndexResolutionError,
    NotAResonanceError,
    SplitRequiredError,
)

logger = logging.getLogger(__name__)

ENDPOINT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ResonanceSet:
    """Resonance points of one boundary matrix, plus zero eigenvalues dropped at infinity."""

    points: Tuple[ResonancePoint, ...]
    dropped_at_infinity: int = 0

    @property
    def count(self) -> int:
        return sum(p.multiplicity for p in self.points) + self.dropped_at_infinity

    def real_points(self) -> Tuple[ResonancePoint, ...]:
        return tuple(p for p in self.points if p.is_real)


@dataclass(frozen=True)
class SsfDecomposition:
    xi_ac: float
    xi_singular: int
    contributing_real_points: Tuple[Tuple[float, int], ...] = field(default=())

    @property
    def xi_total(self) -> float:
        return self.xi_ac + self.xi_singular


def _resonance_set_from_matrix(M: NDArray[np.complex128]) -> ResonanceSet:
    result = small_eigenvalues(M)
    zero_floor = NumericsConfig.ZERO_EIGENVALUE_TOLERANCE * max(1.0, float(np.linalg.norm(M)))
    points: List[ResonancePoint] = []
    dropped = 0
    for group in result.clusters:
        eigenvalue = complex(np.mean(result.values[list(group)]))
        if abs(eigenvalue) <= zero_floor:
            dropped += len(group)
            continue
        points.append(ResonancePoint(-1.0 / eigenvalue, multiplicity=len(group)))
    points.sort(key=lambda p: (p.alpha, p.beta))
    return ResonanceSet(points=tuple(points), dropped_at_infinity=dropped)


def resonance_set(A: MatrixHerglotzModel, lam: float) -> ResonanceSet:
    """Resonance points at ``λ + i0`` with multiplicities from eigenvalue clustering.

    Raises:
        MeasureZeroPointError: λ is excluded for some term of the model.
    """
    return _resonance_set_from_matrix(eval_matrix_boundary(A, lam))


def resonance_set_at(A: MatrixHerglotzModel, z: complex) -> ResonanceSet:
    """Resonance points of ``A(z)`` for non-real z."""
    return _resonance_set_from_matrix(eval_matrix(A, z))


def _perturbation_determinant(M: NDArray[np.complex128], s: float) -> complex:
    return lu_determinant(np.eye(M.shape[0]) + s * M)


def _safe_log_derivative(M: NDArray[np.complex128]):
    def g(s: float) -> complex:
        with warnings.catch_warnings(), np.errstate(all="ignore"):
            warnings.simplefilter("ignore")
            try:
                return log_derivative_trace(M, s)
            except (ValueError, np.linalg.LinAlgError):
                return complex(math.inf)

    return g


def _phase_sum_of_matrix(M: NDArray[np.complex128], a: float, b: float) -> float:
    grid = refine_coupling_grid(_safe_log_derivative(M), a, b)
    determinants = np.array([_perturbation_determinant(M, s) for s in grid])
    moduli = np.abs(determinants)
    small = np.flatnonzero(moduli < NumericsConfig.SCATTERING_DENOMINATOR_FLOOR)
    if small.size:
        location = float(grid[small[0]])
        raise SplitRequiredError(
            f"perturbation determinant vanishes near coupling {location:.12g}",
            location=location,
        )
    points = determinants / moduli
    samples = unwrap_phase(points, float(np.angle(points[0])))
    return -2.0 * samples.total_change


def det_phase_sum(A: MatrixHerglotzModel, lam: float, a: float, b: float) -> float:
    """``Σ_j θ_j(λ; b, a) = -2·Δ arg det(1 + s·A(λ+i0))`` over ``s ∈ [a, b]``.

    Raises:
        SplitRequiredError: a real resonance point lies in ``[a, b]``.
    """
    if a > b:
        raise ValueError(f"det_phase_sum needs a <= b, got [{a}, {b}]")
    if a == b:
        return 0.0
    return _phase_sum_of_matrix(eval_matrix_boundary(A, lam), a, b)


def det_phase_sum_at(A: MatrixHerglotzModel, z: complex, a: float, b: float) -> float:
    """Determinant phase sum of ``A(z)`` for non-real z."""
    if z.imag == 0:
        raise ValueError("det_phase_sum_at needs a non-real z; use det_phase_sum on the axis")
    if a > b:
        raise ValueError(f"det_phase_sum_at needs a <= b, got [{a}, {b}]")
    if a == b:
        return 0.0
    return _phase_sum_of_matrix(eval_matrix(A, z), a, b)


def ssf_from_phase(
    A: MatrixHerglotzModel,
    lam: float,
    a: float,
    b: float,
    *,
    y0: float = NumericsConfig.SSF_PHASE_Y0,
    levels: int = NumericsConfig.SSF_PHASE_LEVELS,
) -> float:
    """``ξ(λ; H_b, H_a)`` as the limit of ``(1/π)·Δ arg det(1 + s·A(λ+iy))`` as ``y -> 0+``.

    Above the axis the phase is continuous in s, so it carries the whole
    shift function, the jumps at real resonance points included. No
    eigenvalue is computed on this path.

    Raises:
        ExtrapolationDivergenceError: the phase sums do not settle as y shrinks.
    """
    if a > b:
        raise ValueError(f"ssf_from_phase needs a <= b, got [{a}, {b}]")
    if a == b:
        return 0.0
    limit = boundary_extrapolate(
        lambda z: complex(-det_phase_sum_at(A, z, a, b) / (2.0 * math.pi)),
        lam,
        y0=y0,
        levels=levels,
    )
    return limit.value.real


def lorentzian_sum_integral(rs: ResonanceSet, a: float, b: float) -> float:
    """``-∫_a^b Σ_j 2β_j / ((r - α_j)² + β_j²) dr`` in closed form.

    Real resonance points contribute nothing here; ``a`` and ``b`` may be infinite.
    """
    if a == b:
        return 0.0
    total = 0.0
    for point in rs.points:
        if point.is_real:
            continue
        width = abs(point.beta)
        swept = math.atan((b - point.alpha) / width) - math.atan((a - point.alpha) / width)
        total += point.multiplicity * 2.0 * math.copysign(1.0, point.beta) * swept
    return -total


def eq2_check(A: MatrixHerglotzModel, lam: float, a: float, b: float) -> IdentityResidual:
    """Determinant phase sum against the eigenvalue Lorentzians."""
    measured = det_phase_sum(A, lam, a, b)
    expected = lorentzian_sum_integral(resonance_set(A, lam), a, b)
    return IdentityResidual(measured=measured, expected=expected)


def resonance_index(
    A: MatrixHerglotzModel,
    lam: float,
    r_real: float,
    y_levels: Sequence[float] = NumericsConfig.INDEX_Y_LEVELS,
) -> int:
    """``N₊ - N₋`` of resonance points at ``λ + iy`` converging to ``r_real``.

    Points are counted with multiplicity inside a disc of radius
    ``10·√y·(1 + |r_real|)``; the count must agree on the two finest levels.

    Raises:
        NotAResonanceError: no resonance point approaches ``r_real``.
        IndexResolutionError: the two finest counts disagree.
    """
    counts: List[Tuple[int, int]] = []
    for y in y_levels:
        radius = NumericsConfig.INDEX_DISC_FACTOR * math.sqrt(y) * (1.0 + abs(r_real))
        nearby = [p for p in resonance_set_at(A, complex(lam, y)).points if abs(p.value - r_real) <= radius]
        n_plus = sum(p.multiplicity for p in nearby if p.beta > 0)
        n_minus = sum(p.multiplicity for p in nearby if p.beta < 0)
        counts.append((n_plus, n_minus))
        logger.debug(
            "resonance index level",
            extra={"lam": lam, "r_real": r_real, "y": y, "n_plus": n_plus, "n_minus": n_minus},
        )

    if sum(counts[-1]) == 0:
        raise NotAResonanceError(f"no resonance point approaches coupling {r_real} at lambda={lam}", r=r_real)
    indices = [n_plus - n_minus for n_plus, n_minus in counts]
    if len(indices) > 1 and indices[-1] != indices[-2]:
        raise IndexResolutionError(
            f"resonance index at coupling {r_real} did not settle: {indices[-2]} then {indices[-1]}",
            counts=counts,
        )
    return indices[-1]


def resonance_index_from_phase(A: MatrixHerglotzModel, lam: float, r_real: float, half_width: float) -> int:
    """Jump of ξ across ``r_real``, read off the determinant phase above the axis.

    ``ssf_from_phase`` over ``[r_real - h, r_real + h]`` minus the closed-form
    absolutely continuous part over the same window leaves the jump, which
    must be an integer. ``h`` must keep every other real resonance point out.

    Raises:
        IndexResolutionError: the remainder is not within 1e-6 of an integer.
    """
    if half_width <= 0:
        raise ValueError(f"half_width must be positive, got {half_width}")
    lo, hi = r_real - half_width, r_real + half_width
    jump = ssf_from_phase(A, lam, lo, hi) + lorentzian_sum_integral(resonance_set(A, lam), lo, hi) / (2.0 * math.pi)
    index = round(jump)
    if abs(jump - index) > NumericsConfig.INDEX_INTEGER_TOLERANCE:
        raise IndexResolutionError(
            f"phase jump {jump:.9g} at coupling {r_real} is not an integer",
            counts=jump,
        )
    return int(index)


def ssf_total(A: MatrixHerglotzModel, lam: float, a: float, b: float) -> SsfDecomposition:
    """``ξ(λ; H_b, H_a) = ξ^(a) + ξ^(s)``.

    ``ξ^(a) = -(1/2π)·lorentzian_sum_integral`` and ``ξ^(s)`` sums resonance
    indices of the real resonance points strictly inside ``(a, b)``.

    Raises:
        EndpointAmbiguityError: a real resonance point sits on ``a`` or ``b``.
    """
    if a > b:
        raise ValueError(f"ssf_total needs a <= b, got [{a}, {b}]")
    if a == b:
        return SsfDecomposition(xi_ac=0.0, xi_singular=0)

    rs = resonance_set(A, lam)
    contributions: List[Tuple[float, int]] = []
    for point in rs.real_points():
        alpha = point.alpha
        for end in (a, b):
            if math.isfinite(end) and abs(alpha - end) <= ENDPOINT_TOLERANCE * (1.0 + abs(end)):
                raise EndpointAmbiguityError(
                    f"real resonance point {alpha:.12g} coincides with the endpoint {end}",
                    r=alpha,
                )
        if a < alpha < b:
            contributions.append((alpha, resonance_index(A, lam, alpha)))

    xi_ac = -lorentzian_sum_integral(rs, a, b) / (2.0 * math.pi)
    return SsfDecomposition(
        xi_ac=xi_ac,
        xi_singular=sum(index for _, index in contributions),
        contributing_real_points=tuple(contributions),
    )


def determinant_factorization_check(
    A: MatrixHerglotzModel,
    lam: float,
    samples: Optional[Sequence[float]] = None,
) -> IdentityResidual:
    """Largest relative gap ``|det(1 + sA₊) - Π_j (1 - s/r_j)|`` over ``samples``."""
    M = eval_matrix_boundary(A, lam)
    rs = _resonance_set_from_matrix(M)
    couplings = np.linspace(-3.0, 3.0, 10) if samples is None else np.asarray(samples, dtype=float)
    worst = 0.0
    for s in couplings:
        direct = _perturbation_determinant(M, float(s))
        product = complex(np.prod([(1.0 - s / p.value) ** p.multiplicity for p in rs.points]))
        worst = max(worst, abs(direct - product) / max(1.0, abs(direct)))
    return IdentityResidual(measured=worst, expected=0.0)
