"""Deterministic numerical kernels.

Polynomial roots (Aberth-Ehrlich simultaneous iteration), small dense
eigenvalues through the characteristic polynomial, phase unwrapping,
adaptive Stieltjes quadrature and Richardson boundary extrapolation.

All functions are pure: no module state, inputs are never mutated.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as P
from numpy.polynomial.legendre import leggauss
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import lu_factor, lu_solve

from resonance_lab.config.settings import NumericsConfig
from resonance_lab.utils.exceptions import (
    BoundaryEvaluationRequiredError,
    ExtrapolationDivergenceError,
    QuadratureBudgetError,
    RefinementNeededError,
    RootFindingError,
)

logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps


# =============================================================================
# POLYNOMIALS
# =============================================================================


@dataclass(frozen=True)
class ComplexPolynomial:
    """Polynomial with complex coefficients in ascending degree."""

    coefficients: Tuple[complex, ...]

    def __post_init__(self):
        coeffs = [complex(c) for c in self.coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if len(coeffs) < 2:
            raise ValueError("polynomial must have degree >= 1 after trimming zeros")
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @classmethod
    def from_roots(cls, roots: ArrayLike, leading: complex = 1.0) -> "ComplexPolynomial":
        coeffs = leading * P.polyfromroots(np.asarray(roots, dtype=complex))
        return cls(tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> complex:
        return self.coefficients[-1]

    def as_array(self) -> NDArray[np.complex128]:
        return np.asarray(self.coefficients, dtype=complex)

    def __call__(self, s: ArrayLike) -> NDArray[np.complex128]:
        return P.polyval(np.asarray(s, dtype=complex), self.as_array())


def poly_roots(
    p: ComplexPolynomial,
    *,
    max_iterations: int = NumericsConfig.ROOT_MAX_ITERATIONS,
    tolerance: float = NumericsConfig.ROOT_STEP_TOLERANCE,
) -> NDArray[np.complex128]:
    """All roots of ``p`` by Aberth-Ehrlich iteration on the monic polynomial.

    Starting points sit on a circle of radius ``1 + max|c_k|`` (a bound on
    every root of the monic polynomial), rotated by a fixed irrational
    offset so that symmetric polynomials do not start on a symmetry axis.

    A root is frozen once its correction is below ``tolerance`` relative to
    its size, or once the backward residual ``|p(z)|`` is at rounding level.

    Raises:
        RootFindingError: iteration cap reached with residuals above the
            rounding level; carries the best iterate and its residual.
    """
    monic = p.as_array() / p.leading
    n = p.degree
    if n == 1:
        return np.array([-monic[0]], dtype=complex)

    derivative = P.polyder(monic)
    abs_coeffs = np.abs(monic)
    radius = 1.0 + float(np.max(abs_coeffs[:-1]))
    angles = 2.0 * np.pi * np.arange(n) / n + NumericsConfig.ROOT_ANGLE_OFFSET
    z = radius * np.exp(1j * angles)
    converged = np.zeros(n, dtype=bool)
    off_diagonal = ~np.eye(n, dtype=bool)

    for _ in range(max_iterations):
        pz = P.polyval(z, monic)
        dpz = P.polyval(z, derivative)
        diff = z[:, None] - z[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            inverse = np.where(off_diagonal, 1.0 / np.where(off_diagonal, diff, 1.0), 0.0)
            repulsion = inverse.sum(axis=1)
            newton = pz / dpz
            step = newton / (1.0 - newton * repulsion)
        stalled = ~np.isfinite(step)
        if stalled.any():
            # Durand-Kerner correction where p'(z) vanished
            products = np.prod(np.where(off_diagonal, diff, 1.0), axis=1)
            with np.errstate(divide="ignore", invalid="ignore"):
                step[stalled] = pz[stalled] / products[stalled]
            step[~np.isfinite(step)] = 0.0
        step[converged] = 0.0
        z = z - step

        scale = P.polyval(np.abs(z), abs_coeffs)
        at_rounding = np.abs(P.polyval(z, monic)) <= 16.0 * _EPS * scale
        converged |= (np.abs(step) <= tolerance * (1.0 + np.abs(z))) | at_rounding
        if converged.all():
            break
    else:
        scale = P.polyval(np.abs(z), abs_coeffs)
        residual = float(np.max(np.abs(P.polyval(z, monic)) / scale))
        if residual > 1e3 * _EPS:
            raise RootFindingError(
                f"root iteration did not converge in {max_iterations} steps",
                best_iterate=z.copy(),
                residual=residual,
            )
        logger.debug("root iteration hit cap at rounding level", extra={"residual": residual})

    order = np.lexsort((z.imag, z.real))
    return z[order]


# =============================================================================
# SMALL DENSE MATRICES
# =============================================================================


def lu_determinant(M: ArrayLike) -> complex:
    """Determinant from an explicit partial-pivoting LU factorization."""
    A = np.asarray(M, dtype=complex)
    if A.shape == (0, 0):
        return 1.0 + 0j
    lu, piv = lu_factor(A, check_finite=False)
    swaps = int(np.count_nonzero(piv != np.arange(len(piv))))
    sign = -1.0 if swaps % 2 else 1.0
    return complex(sign * np.prod(np.diag(lu)))


def log_derivative_trace(A: ArrayLike, s: float) -> complex:
    """``tr((1 + sA)^-1 A)``, the coupling derivative of ``log det(1 + sA)``."""
    A = np.asarray(A, dtype=complex)
    k = A.shape[0]
    lu = lu_factor(np.eye(k) + s * A, check_finite=False)
    return complex(np.trace(lu_solve(lu, A, check_finite=False)))


def characteristic_polynomial(M: ArrayLike) -> ComplexPolynomial:
    """Monic ``det(sI - M)`` sampled on a circle and recovered by FFT.

    The circle radius tracks the Frobenius norm of ``M``, which bounds every
    eigenvalue; sampling ``2(k+1)`` points leaves no aliasing for degree k.
    """
    A = np.asarray(M, dtype=complex)
    k = A.shape[0]
    rho = max(1.0, float(np.linalg.norm(A)))
    n_samples = 2 * (k + 1)
    nodes = rho * np.exp(2j * np.pi * np.arange(n_samples) / n_samples)
    values = np.array([lu_determinant(node * np.eye(k) - A) for node in nodes])
    coeffs = np.fft.fft(values)[: k + 1] / n_samples
    coeffs /= rho ** np.arange(k + 1)
    coeffs[k] = 1.0
    return ComplexPolynomial(tuple(coeffs))


@dataclass(frozen=True)
class EigenvalueResult:
    """Eigenvalues plus groups of indices that sit in a numerical cluster."""

    values: NDArray[np.complex128]
    clusters: Tuple[Tuple[int, ...], ...]

    @property
    def clustered(self) -> bool:
        return any(len(group) > 1 for group in self.clusters)


def cluster_radius(multiplicity: int, scale: float) -> float:
    """Spread of a computed ``multiplicity``-fold root around the true one.

    A backward error ``δ`` in the coefficients moves an m-fold root by about
    ``δ^(1/m)``, so the radius grows with the size of the candidate group.
    """
    spread = NumericsConfig.CLUSTER_BACKWARD_ERROR ** (1.0 / multiplicity)
    return scale * max(NumericsConfig.CLUSTER_TOLERANCE, spread)


def _cluster_groups(values: NDArray[np.complex128], scale: float) -> Tuple[Tuple[int, ...], ...]:
    n = len(values)
    unassigned = list(range(n))
    groups: List[Tuple[int, ...]] = []

    # largest groups first, so a triple root is not split into a pair and a singleton
    for size in range(n, 1, -1):
        radius = cluster_radius(size, scale)
        for seed in list(unassigned):
            if seed not in unassigned or len(unassigned) < size:
                continue
            nearest = sorted(unassigned, key=lambda j: (abs(values[j] - values[seed]), j))[:size]
            centroid = values[nearest].mean()
            if np.max(np.abs(values[nearest] - centroid)) <= radius:
                groups.append(tuple(sorted(nearest)))
                unassigned = [j for j in unassigned if j not in nearest]

    groups.extend((j,) for j in unassigned)
    return tuple(sorted(groups))


def small_eigenvalues(M: ArrayLike) -> EigenvalueResult:
    """Eigenvalues of a k x k complex matrix, ``1 <= k <= 16``.

    Characteristic polynomial, then :func:`poly_roots`, then one Newton step
    per isolated root on ``det(M - aI)``. Every member of a cluster is
    replaced by the cluster centroid and the group is reported through
    ``clusters``.
    """
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    k = A.shape[0]
    if not 1 <= k <= NumericsConfig.MAX_EIGEN_DIMENSION:
        raise ValueError(f"matrix dimension {k} outside 1..{NumericsConfig.MAX_EIGEN_DIMENSION}")

    if k == 1:
        return EigenvalueResult(values=np.array([A[0, 0]]), clusters=((0,),))

    roots = poly_roots(characteristic_polynomial(A))
    scale = max(1.0, float(np.linalg.norm(A)))
    clusters = _cluster_groups(roots, scale)

    refined = roots.copy()
    identity = np.eye(k)
    for group in clusters:
        if len(group) != 1:
            # the centroid of a cluster is well conditioned even when its members are not
            refined[list(group)] = roots[list(group)].mean()
            continue
        i = group[0]
        a = roots[i]
        shifted = A - a * identity
        before = abs(lu_determinant(shifted))
        if before == 0.0:
            continue
        lu = lu_factor(shifted, check_finite=False)
        trace_inverse = np.trace(lu_solve(lu, identity.astype(complex), check_finite=False))
        if trace_inverse == 0 or not np.isfinite(trace_inverse):
            continue
        candidate = a + 1.0 / trace_inverse
        if abs(lu_determinant(A - candidate * identity)) <= before:
            refined[i] = candidate

    return EigenvalueResult(values=refined, clusters=clusters)


# =============================================================================
# PHASE UNWRAPPING
# =============================================================================


@dataclass(frozen=True)
class PhaseSamples:
    """Continuous branch of arguments for a sequence of unit complex numbers."""

    arguments: NDArray[np.float64]
    source_points: NDArray[np.complex128]

    def __len__(self) -> int:
        return len(self.arguments)

    @property
    def total_change(self) -> float:
        return float(self.arguments[-1] - self.arguments[0])


def unwrap_phase(points: Sequence[complex], anchor: float = 0.0) -> PhaseSamples:
    """Continuous argument of ``points`` with ``arguments[0] == anchor``.

    Each step adds the principal value of ``arg(p[i+1] / p[i])``. The anchor
    must be an argument of ``points[0]``.

    Raises:
        RefinementNeededError: an adjacent step is ``>= pi/2``; the caller
            should refine its grid around the reported index.
    """
    pts = np.asarray(points, dtype=complex)
    if pts.ndim != 1 or len(pts) == 0:
        raise ValueError("unwrap_phase needs a non-empty 1-d sequence")
    if np.any(np.abs(np.abs(pts) - 1.0) > 1e-9):
        raise ValueError("unwrap_phase expects unit-modulus points")
    if abs(math.remainder(anchor - float(np.angle(pts[0])), 2.0 * math.pi)) > 1e-9:
        raise ValueError(f"anchor {anchor} is not an argument of the first point")

    increments = np.angle(pts[1:] * np.conj(pts[:-1]))
    too_far = np.flatnonzero(np.abs(increments) >= NumericsConfig.UNWRAP_MAX_JUMP)
    if too_far.size:
        index = int(too_far[0]) + 1
        raise RefinementNeededError(
            f"phase jump of {increments[too_far[0]]:.3f} rad before sample {index}",
            index=index,
        )

    arguments = np.empty(len(pts))
    arguments[0] = anchor
    np.cumsum(increments, out=arguments[1:])
    arguments[1:] += anchor
    return PhaseSamples(arguments=arguments, source_points=pts)


# =============================================================================
# QUADRATURE
# =============================================================================


@dataclass(frozen=True)
class SpectralWeight:
    """A density on ``[lower, upper]``; infinite ends are tangent-mapped.

    ``center`` and ``scale`` set the substitution ``t = center + scale * tan(phi)``
    used when either end is infinite.
    """

    density: Callable[[NDArray[np.float64]], NDArray[np.float64]]
    lower: float
    upper: float
    center: float = 0.0
    scale: float = 1.0

    @property
    def infinite(self) -> bool:
        return math.isinf(self.lower) or math.isinf(self.upper)


def adaptive_stieltjes(
    weight: SpectralWeight,
    z: complex,
    *,
    tolerance: float = NumericsConfig.QUADRATURE_TOLERANCE,
    order: int = NumericsConfig.QUADRATURE_ORDER,
    max_panels: int = NumericsConfig.QUADRATURE_MAX_PANELS,
) -> complex:
    """``∫ weight(t) / (t - z) dt`` by adaptive bisection of Gauss-Legendre panels.

    A panel is accepted when its two halves agree with the whole panel to
    within its share of ``tolerance``. Panels are processed left to right
    from an explicit stack, so the schedule is deterministic.

    Raises:
        BoundaryEvaluationRequiredError: real ``z`` inside the support.
        QuadratureBudgetError: more than ``max_panels`` panel evaluations.
    """
    z = complex(z)
    if z.imag == 0.0 and weight.lower <= z.real <= weight.upper:
        raise BoundaryEvaluationRequiredError(
            f"z = {z.real} lies on the support [{weight.lower}, {weight.upper}]"
        )
    nodes, node_weights = leggauss(order)

    if weight.infinite:
        lo = -0.5 * math.pi if math.isinf(weight.lower) else math.atan((weight.lower - weight.center) / weight.scale)
        hi = 0.5 * math.pi if math.isinf(weight.upper) else math.atan((weight.upper - weight.center) / weight.scale)

        def integrand(phi: NDArray[np.float64]) -> NDArray[np.complex128]:
            t = weight.center + weight.scale * np.tan(phi)
            jacobian = weight.scale / np.cos(phi) ** 2
            return weight.density(t) * jacobian / (t - z)

    else:
        lo, hi = weight.lower, weight.upper

        def integrand(t: NDArray[np.float64]) -> NDArray[np.complex128]:
            return weight.density(t) / (t - z)

    def panel(a: float, b: float) -> complex:
        half = 0.5 * (b - a)
        x = half * nodes + 0.5 * (a + b)
        return complex(half * np.dot(node_weights, integrand(x)))

    width = hi - lo
    if width <= 0.0:
        return 0j

    result = 0j
    error_estimate = 0.0
    evaluations = 1
    stack = [(lo, hi, panel(lo, hi))]
    while stack:
        a, b, whole = stack.pop()
        mid = 0.5 * (a + b)
        left, right = panel(a, mid), panel(mid, b)
        evaluations += 2
        local_error = abs(left + right - whole)
        if local_error <= tolerance * (b - a) / width or (b - a) <= 1e-14 * width:
            result += left + right
            error_estimate += local_error
            continue
        if evaluations > max_panels:
            pending = sum(item[2] for item in stack) + left + right
            raise QuadratureBudgetError(
                f"quadrature budget of {max_panels} panels exhausted",
                estimate=result + pending,
                error_estimate=error_estimate + local_error,
            )
        stack.append((mid, b, right))
        stack.append((a, mid, left))

    return result


# =============================================================================
# BOUNDARY VALUES
# =============================================================================


@dataclass(frozen=True)
class Extrapolation:
    value: complex
    error_estimate: float


def boundary_extrapolate(
    f: Callable[[complex], complex],
    lam: float,
    *,
    y0: float = NumericsConfig.EXTRAPOLATION_Y0,
    levels: int = NumericsConfig.EXTRAPOLATION_LEVELS,
    max_error: float = NumericsConfig.EXTRAPOLATION_MAX_ERROR,
) -> Extrapolation:
    """Limit of ``f(lam + iy)`` as ``y -> 0+``.

    Samples ``y_k = y0 * 2^-k`` for ``k = 0..levels`` and applies two
    Richardson eliminations (orders y and y^2). The error estimate is the
    gap between the last two extrapolated values.

    Raises:
        ExtrapolationDivergenceError: extrapolated values keep moving apart
            (lam sits on an atom or another bad point of the model), or the
            final error estimate exceeds ``max_error``.
    """
    ys = y0 * 0.5 ** np.arange(levels + 1)
    samples = np.array([complex(f(complex(lam, y))) for y in ys])
    if not np.all(np.isfinite(samples)):
        raise ExtrapolationDivergenceError(f"non-finite boundary samples at lambda={lam}", lam=lam)

    first = 2.0 * samples[1:] - samples[:-1]
    second = (4.0 * first[1:] - first[:-1]) / 3.0
    value = complex(second[-1])
    gaps = np.abs(np.diff(second))
    error_estimate = float(gaps[-1])

    floor = 1e-10 * (1.0 + abs(value))
    if len(gaps) >= 3 and gaps[-1] > floor and gaps[-1] > gaps[-2] > gaps[-3]:
        raise ExtrapolationDivergenceError(
            f"boundary values diverge as y -> 0+ at lambda={lam}",
            lam=lam,
            last_gaps=gaps[-3:].tolist(),
        )
    if error_estimate > max_error * (1.0 + abs(value)):
        raise ExtrapolationDivergenceError(
            f"boundary extrapolation did not settle at lambda={lam}",
            lam=lam,
            error_estimate=error_estimate,
        )
    return Extrapolation(value=value, error_estimate=error_estimate)
