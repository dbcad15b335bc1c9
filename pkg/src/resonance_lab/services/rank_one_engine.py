"""Rank-one resonance points, scattering phase and the identities they obey.

With ``F₊ = F(λ + i0)`` the resonance point in the coupling constant is
``r = -1/F₊`` and the non-trivial scattering eigenvalue is the boundary ratio
``S(r) = (1 + r·conj F₊) / (1 + r·F₊)``: unit modulus on the real axis,
``S(0) = 1``, a pole at ``r`` and a zero at ``conj r``. Its continuous
argument ``θ₁(λ, r)`` satisfies the Lorentzian law
``θ₁' = -2β / ((r - α)² + β²)``; every check in this module compares that
law, or a consequence of it, against an independent numerical path.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from resonance_lab.config.settings import NumericsConfig
from resonance_lab.services.coupling_grid import refine_coupling_grid
from resonance_lab.services.herglotz_models import (
    ScalarHerglotzModel,
    eval_boundary_scalar,
    eval_scalar,
)
from resonance_lab.services.numerics_core import unwrap_phase
from resonance_lab.utils.exceptions import (
    AtRealResonanceError,
    NoFiniteResonanceError,
    NotApplicableError,
    SingularityError,
    SplitRequiredError,
)

logger = logging.getLogger(__name__)


# =============================================================================
# TYPES
# =============================================================================


@dataclass(frozen=True)
class ResonancePoint:
    """Pole ``r = α + iβ`` in the coupling constant."""

    value: complex
    multiplicity: int = 1

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be positive")

    @property
    def alpha(self) -> float:
        return self.value.real

    @property
    def beta(self) -> float:
        return self.value.imag

    @property
    def is_real(self) -> bool:
        return abs(self.beta) <= NumericsConfig.EPS_REAL * (1.0 + abs(self.alpha))

    def conjugate(self) -> "ResonancePoint":
        return ResonancePoint(self.value.conjugate(), self.multiplicity)


@dataclass(frozen=True, eq=False)
class PhaseTrace:
    """Continuous θ₁(λ, ·) over an increasing coupling grid."""

    lam: float
    grid: NDArray[np.float64]
    theta: NDArray[np.float64]

    @property
    def total_change(self) -> float:
        return float(self.theta[-1] - self.theta[0])

    def at(self, r: float) -> float:
        """θ at a grid node."""
        index = int(np.searchsorted(self.grid, r))
        if index >= len(self.grid) or self.grid[index] != r:
            raise KeyError(f"coupling {r} is not a node of this trace")
        return float(self.theta[index])


@dataclass(frozen=True)
class IdentityResidual:
    """Two sides of an identity; ``residual = |measured - expected|``."""

    measured: float
    expected: float
    bound: Optional[float] = None

    @property
    def residual(self) -> float:
        return abs(self.measured - self.expected)


# =============================================================================
# RESONANCE POINTS
# =============================================================================


def boundary_value(F: ScalarHerglotzModel, lam: float, side: int = 1) -> complex:
    """``F(λ + i0)`` for ``side=1``, ``F(λ - i0)`` for ``side=-1``."""
    value = eval_boundary_scalar(F, lam)
    return value if side > 0 else value.conjugate()


def _resonance_from_value(f: complex, where: complex) -> ResonancePoint:
    if f == 0 or not cmath.isfinite(-1.0 / f):
        raise NoFiniteResonanceError(
            f"F vanishes at {where}; the resonance point escaped to infinity", where=where
        )
    return ResonancePoint(-1.0 / f)


def eigenvalue_identity_residual(f: complex, r: complex, s: float) -> float:
    """``|F/(1+sF) - 1/(s-r)|`` relative to the size of either side."""
    lhs = f / (1.0 + s * f)
    rhs = 1.0 / (s - r)
    return abs(lhs - rhs) / max(1.0, abs(lhs))


def resonance_point(F: ScalarHerglotzModel, lam: float, side: int = 1) -> ResonancePoint:
    """``r_{λ±i0} = -1/F(λ±i0)``.

    Raises:
        NoFiniteResonanceError: ``F(λ + i0) = 0``.
        MeasureZeroPointError: λ is an excluded point of the model.
    """
    f = boundary_value(F, lam, side)
    point = _resonance_from_value(f, lam)
    for s in (0.0, 1.0, -2.0):
        if abs(1.0 + s * f) < NumericsConfig.SCATTERING_DENOMINATOR_FLOOR:
            continue
        gap = eigenvalue_identity_residual(f, point.value, s)
        if gap > 1e-12:
            logger.warning(
                "eigenvalue identity off at test coupling",
                extra={"lam": lam, "s": s, "gap": gap},
            )
    return point


def resonance_point_at(F: ScalarHerglotzModel, z: complex) -> ResonancePoint:
    """``r_z = -1/F(z)`` for non-real z."""
    return _resonance_from_value(eval_scalar(F, z), z)


# =============================================================================
# SCATTERING EIGENVALUE AND PHASE
# =============================================================================


def continued_scattering_eigenvalue(f_plus: complex, s: complex) -> complex:
    """``(1 + s·conj F₊) / (1 + s·F₊)`` at complex coupling s."""
    return (1.0 + s * f_plus.conjugate()) / (1.0 + s * f_plus)


def scattering_eigenvalue(F: ScalarHerglotzModel, lam: float, r: float) -> complex:
    """Non-trivial eigenvalue ``e^{iθ₁(λ, r)}`` of ``S(λ; H_r, H_0)``.

    Raises:
        AtRealResonanceError: ``|1 + r·F₊| < 1e-13``.
    """
    f = boundary_value(F, lam)
    return _scattering_from_value(f, r)


def _scattering_from_value(f: complex, r: float) -> complex:
    denominator = 1.0 + r * f
    if abs(denominator) < NumericsConfig.SCATTERING_DENOMINATOR_FLOOR:
        raise AtRealResonanceError(f"coupling {r} is a real resonance point", r=r)
    return (1.0 + r * f.conjugate()) / denominator


def _log_derivative(f: complex):
    def g(r: float) -> complex:
        denominator = 1.0 + r * f
        if denominator == 0:
            return complex(math.inf)
        return f / denominator

    return g


def _transport_anchor(f: complex, point: Optional[ResonancePoint], target: float) -> float:
    """θ₁ at ``target``, carried continuously from θ₁(0) = 0."""
    if target == 0.0:
        return 0.0
    lo, hi = min(0.0, target), max(0.0, target)
    if point is not None and point.is_real and lo <= point.alpha <= hi:
        # beyond a real resonance the phase restarts on its principal branch
        return float(np.angle(_scattering_from_value(f, target)))
    grid = refine_coupling_grid(_log_derivative(f), lo, hi)
    points = np.array([_scattering_from_value(f, r) for r in grid])
    if target > 0:
        return float(unwrap_phase(points, 0.0).arguments[-1])
    return float(unwrap_phase(points[::-1], 0.0).arguments[-1])


def phase_trace(
    F: ScalarHerglotzModel,
    lam: float,
    a: float,
    b: float,
    *,
    include: Iterable[float] = (),
) -> PhaseTrace:
    """Continuous θ₁(λ, ·) on an adaptively refined grid over ``[a, b]``.

    Normalized by θ₁(λ, 0) = 0; when 0 is outside ``[a, b]`` the anchor is
    transported from 0 along a preliminary grid. Points in ``include`` are
    forced into the grid.

    Raises:
        SplitRequiredError: a real resonance point lies in ``[a, b]``.
    """
    if a > b:
        raise ValueError(f"phase_trace needs a <= b, got [{a}, {b}]")
    f = boundary_value(F, lam)
    if f == 0:
        grid = np.array(sorted({a, b, *[x for x in include if a <= x <= b]}))
        return PhaseTrace(lam=lam, grid=grid, theta=np.zeros(len(grid)))

    point = _resonance_from_value(f, lam)
    if point.is_real and a <= point.alpha <= b:
        raise SplitRequiredError(
            f"real resonance at coupling {point.alpha:.12g} inside [{a}, {b}]",
            location=point.alpha,
        )

    anchor = _transport_anchor(f, point, a)
    grid = refine_coupling_grid(_log_derivative(f), a, b, include=include)
    points = np.array([_scattering_from_value(f, r) for r in grid])
    samples = unwrap_phase(points, anchor)
    return PhaseTrace(lam=lam, grid=grid, theta=samples.arguments)


def phase_derivative(point: ResonancePoint, r: float) -> float:
    """Lorentzian ``θ₁'(r) = -2β / ((r - α)² + β²)``.

    Raises:
        SingularityError: real resonance evaluated at ``r = α``.
    """
    if point.is_real and r == point.alpha:
        raise SingularityError(f"phase derivative is singular at the real resonance {r}", r=r)
    if point.beta == 0.0:
        return 0.0
    return -2.0 * point.beta / ((r - point.alpha) ** 2 + point.beta**2)


def phase_derivative_fd(F: ScalarHerglotzModel, lam: float, r: float, h: float = NumericsConfig.FD_STEP) -> float:
    """Centered difference ``(θ₁(r + h) - θ₁(r - h)) / 2h`` over a traced phase."""
    trace = phase_trace(F, lam, r - h, r + h)
    return trace.total_change / (2.0 * h)


# =============================================================================
# IDENTITY CHECKS
# =============================================================================


def breit_wigner_check(
    F: ScalarHerglotzModel,
    lam: float,
    h: float = NumericsConfig.FD_STEP,
    tolerance: float = NumericsConfig.FD_TOLERANCE,
) -> IdentityResidual:
    """Centered difference of θ₁ at ``r = Re r_{λ+i0}`` against ``-2 / Im r_{λ+i0}``.

    The truncation bound is ``h²/6 · |θ₁'''(α)| = (2/3) h² / |β|³``. When the
    residual exceeds ``tolerance`` (relative), one Richardson step with
    ``h/2`` replaces the plain difference.

    Raises:
        NotApplicableError: the resonance point is real.
    """
    point = resonance_point(F, lam)
    if point.is_real:
        raise NotApplicableError(
            f"resonance point {point.alpha:.12g} at lambda={lam} is real; Breit-Wigner needs beta != 0",
            lam=lam,
        )
    expected = -2.0 / point.beta
    bound = (2.0 / 3.0) * h**2 / abs(point.beta) ** 3
    measured = phase_derivative_fd(F, lam, point.alpha, h)
    if abs(measured - expected) > tolerance * max(1.0, abs(expected)):
        half = phase_derivative_fd(F, lam, point.alpha, 0.5 * h)
        measured = (4.0 * half - measured) / 3.0
    return IdentityResidual(measured=measured, expected=expected, bound=bound)


def lorentzian_check(F: ScalarHerglotzModel, lam: float, r: float, h: float = NumericsConfig.FD_STEP) -> IdentityResidual:
    """Centered difference of θ₁ at any r against the closed-form Lorentzian."""
    point = resonance_point(F, lam)
    expected = phase_derivative(point, r)
    measured = phase_derivative_fd(F, lam, r, h)
    return IdentityResidual(measured=measured, expected=expected)


def trace_identity_check(F: ScalarHerglotzModel, lam: float, r: float) -> IdentityResidual:
    """Lorentzian θ₁'(r) against ``-2·Im(F₊ / (1 + r·F₊))``.

    For rank one ``Tr(V·Im R_{λ+i0}(H_r)) = Im(F₊ / (1 + r F₊))`` by the
    resolvent identity, so this is the trace step of the derivation.

    Raises:
        SingularityError: r is a real resonance point.
    """
    f = boundary_value(F, lam)
    denominator = 1.0 + r * f
    if abs(denominator) < NumericsConfig.SCATTERING_DENOMINATOR_FLOOR:
        raise SingularityError(f"trace identity is singular at the real resonance {r}", r=r)
    trace_side = -2.0 * (f / denominator).imag
    if f == 0:
        return IdentityResidual(measured=trace_side, expected=0.0)
    lorentzian = phase_derivative(_resonance_from_value(f, lam), r)
    return IdentityResidual(measured=trace_side, expected=lorentzian)


def total_phase_variation(F: ScalarHerglotzModel, lam: float) -> float:
    """θ₁(λ; +∞, -∞): ``-2π·sign(β)``, or 0 for a real resonance point."""
    try:
        point = resonance_point(F, lam)
    except NoFiniteResonanceError:
        return 0.0
    if point.is_real:
        return 0.0
    # ∫ 2β / ((r-α)² + β²) dr over the line is 2π·sign(β)
    return -2.0 * math.copysign(1.0, point.beta) * (math.atan(math.inf) - math.atan(-math.inf))


def _lorentzian_antiderivative(point: ResonancePoint, s: float) -> float:
    """``sign(β)·arctan((s - α)/|β|)``; the phase is ``-2`` times this."""
    return math.copysign(1.0, point.beta) * math.atan((s - point.alpha) / abs(point.beta))


def ssf_ac(F: ScalarHerglotzModel, lam: float, a: float, b: float) -> float:
    """Absolutely continuous SSF ``ξ^(a)(λ; H_b, H_a) = -(θ₁(b) - θ₁(a)) / 2π``.

    Closed form from the Lorentzian antiderivative; ``a`` and ``b`` may be
    infinite, and ``[-∞, ∞]`` gives 1 for any non-real resonance point.

    Raises:
        SplitRequiredError: a real resonance point lies in ``[a, b]``.
    """
    if a > b:
        raise ValueError(f"ssf_ac needs a <= b, got [{a}, {b}]")
    if a == b:
        return 0.0
    try:
        point = resonance_point(F, lam)
    except NoFiniteResonanceError:
        return 0.0
    if point.is_real:
        if a <= point.alpha <= b:
            raise SplitRequiredError(
                f"real resonance at coupling {point.alpha:.12g} inside [{a}, {b}]",
                location=point.alpha,
            )
        return 0.0
    return (_lorentzian_antiderivative(point, b) - _lorentzian_antiderivative(point, a)) / math.pi


def pushnitski_check(F: ScalarHerglotzModel, lam: float, a: float, b: float) -> IdentityResidual:
    """``-(θ₁(b) - θ₁(a)) / 2π`` from the traced phase against :func:`ssf_ac`."""
    trace = phase_trace(F, lam, a, b)
    measured = -trace.total_change / (2.0 * math.pi)
    return IdentityResidual(measured=measured, expected=ssf_ac(F, lam, a, b))


@dataclass(frozen=True)
class PhaseRangeResult:
    delta: float
    lower: float
    upper: float
    passed: bool


def phase_range_check(F: ScalarHerglotzModel, lam: float, a: float, b: float, margin: float = 1e-12) -> PhaseRangeResult:
    """θ₁(λ; b, a) lies strictly inside ``(-2π, 0)`` for β > 0 (``(0, 2π)`` for β < 0).

    ``e^{iθ₁(λ; b, a)} = 1`` would contradict Rolle's theorem, since θ₁' never
    vanishes. The margin only applies to intervals with ``b - a >= 1e-6``.
    """
    point = resonance_point(F, lam)
    if point.is_real:
        raise NotApplicableError(f"real resonance point at lambda={lam}; the phase is flat", lam=lam)
    if not a < b:
        raise ValueError("phase_range_check needs a < b")
    delta = phase_trace(F, lam, a, b).total_change
    lower, upper = (-2.0 * math.pi, 0.0) if point.beta > 0 else (0.0, 2.0 * math.pi)
    pad = margin if b - a >= 1e-6 else 0.0
    passed = lower + pad < delta < upper - pad
    return PhaseRangeResult(delta=delta, lower=lower, upper=upper, passed=passed)


# =============================================================================
# LIMITING ABSORPTION AND CONTINUATION
# =============================================================================


@dataclass(frozen=True)
class LimitingAbsorptionReport:
    ys: Tuple[float, ...]
    distances: Tuple[float, ...]
    imaginary_parts: Tuple[float, ...]
    conjugation_gap: float

    @property
    def passed(self) -> bool:
        monotone = all(d1 <= d0 for d0, d1 in zip(self.distances, self.distances[1:]))
        return monotone and all(b > 0 for b in self.imaginary_parts) and self.conjugation_gap <= 1e-12


def limiting_absorption_check(
    F: ScalarHerglotzModel,
    lam: float,
    ys: Sequence[float] = (1e-1, 1e-3, 1e-6),
) -> LimitingAbsorptionReport:
    """``r_{λ+iy}`` stays in the upper half-plane and approaches ``r_{λ+i0}``."""
    limit = resonance_point(F, lam)
    below = resonance_point(F, lam, side=-1)
    distances, imaginary = [], []
    for y in ys:
        point = resonance_point_at(F, complex(lam, y))
        distances.append(abs(point.value - limit.value))
        imaginary.append(point.beta)
    return LimitingAbsorptionReport(
        ys=tuple(ys),
        distances=tuple(distances),
        imaginary_parts=tuple(imaginary),
        conjugation_gap=abs(below.value - limit.value.conjugate()),
    )


@dataclass(frozen=True)
class ContinuationReport:
    pole: complex
    zero: complex
    pole_moduli: Tuple[float, ...]
    zero_moduli: Tuple[float, ...]
    unitarity_gap: float
    pole_bound: float
    zero_bound: float

    @property
    def passed(self) -> bool:
        return (
            min(self.pole_moduli) > self.pole_bound
            and max(self.zero_moduli) < self.zero_bound
            and self.unitarity_gap <= 1e-12
        )


def continuation_pole_check(
    F: ScalarHerglotzModel,
    lam: float,
    radius: float = NumericsConfig.CONTINUATION_RADIUS,
    samples: int = NumericsConfig.CONTINUATION_SAMPLES,
) -> ContinuationReport:
    """The continued eigenvalue blows up at ``r_{λ+i0}`` and vanishes at its conjugate.

    Samples ``s ↦ (1 + s·conj F₊)/(1 + s·F₊)`` on circles of ``radius`` around
    both points, plus real couplings where it must stay unimodular.

    Raises:
        NotApplicableError: the resonance point is real.
    """
    f = boundary_value(F, lam)
    point = resonance_point(F, lam)
    if point.is_real:
        raise NotApplicableError(f"real resonance point at lambda={lam}; nothing to continue", lam=lam)
    circle = radius * np.exp(2j * np.pi * (np.arange(samples) + 0.5) / samples)
    pole_moduli = tuple(float(abs(continued_scattering_eigenvalue(f, point.value + c))) for c in circle)
    zero_moduli = tuple(float(abs(continued_scattering_eigenvalue(f, point.value.conjugate() + c))) for c in circle)
    real_couplings = point.alpha + abs(point.beta) * np.linspace(-4.0, 4.0, 9)
    unitarity_gap = max(abs(abs(continued_scattering_eigenvalue(f, complex(s))) - 1.0) for s in real_couplings)
    return ContinuationReport(
        pole=point.value,
        zero=point.value.conjugate(),
        pole_moduli=pole_moduli,
        zero_moduli=zero_moduli,
        unitarity_gap=float(unitarity_gap),
        pole_bound=NumericsConfig.CONTINUATION_POLE_BOUND,
        zero_bound=NumericsConfig.CONTINUATION_ZERO_BOUND,
    )
