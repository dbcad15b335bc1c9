"""Catalog of scalar and matrix-valued Herglotz functions.

A scalar model is the Borel transform ``F(z) = ∫ dμ(t) / (t - z)`` of a finite
positive measure; it stands in for ``<R_z(H0) φ, φ>``. A matrix model is
``A(z) = J · Σ C_m F_m(z)`` and stands in for ``J F R_z(H0) F*``. Nothing here
builds an operator: closed-form boundary values are the whole input of the
engines.
"""

import cmath
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from resonance_lab.services.numerics_core import (
    SpectralWeight,
    adaptive_stieltjes,
    boundary_extrapolate,
)
from resonance_lab.utils.exceptions import (
    BoundaryEvaluationRequiredError,
    MeasureZeroPointError,
)

logger = logging.getLogger(__name__)

# Relative distance under which lambda counts as sitting on an excluded point
EXCLUSION_TOLERANCE = 1e-12


class ScalarHerglotzModel(ABC):
    """Finite positive measure μ, seen through its Borel transform."""

    @abstractmethod
    def evaluate(self, z: complex) -> complex:
        """F(z) for z off the support."""

    @abstractmethod
    def boundary(self, lam: float) -> complex:
        """Closed-form F(lam + i0); lam is not an excluded point."""

    @abstractmethod
    def on_support(self, x: float) -> bool:
        """Whether real x lies in the closed support of μ."""

    @abstractmethod
    def excluded_points(self) -> Tuple[float, ...]:
        """Atoms and support endpoints (the per-model bad lambdas)."""

    @abstractmethod
    def continuous_parts(self) -> List[SpectralWeight]:
        """Absolutely continuous pieces of μ, for the quadrature oracle."""

    @abstractmethod
    def atoms(self) -> List[Tuple[float, float]]:
        """(position, weight) pairs of the pure point part."""

    @property
    @abstractmethod
    def total_mass(self) -> float:
        ...


@dataclass(frozen=True)
class Cauchy(ScalarHerglotzModel):
    """Lorentzian density ``(mass·scale/π) / ((t - center)^2 + scale^2)``."""

    center: float = 0.0
    scale: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("cauchy scale must be positive")
        _check_mass(self.mass)

    def evaluate(self, z: complex) -> complex:
        z = complex(z)
        if z.imag > 0:
            return self.mass / complex(self.center - z.real, -self.scale - z.imag)
        if z.imag < 0:
            return self.mass / complex(self.center - z.real, self.scale - z.imag)
        raise BoundaryEvaluationRequiredError(
            f"cauchy model has full support; z = {z.real} needs a boundary value"
        )

    def boundary(self, lam: float) -> complex:
        return self.mass / complex(self.center - lam, -self.scale)

    def on_support(self, x: float) -> bool:
        return True

    def excluded_points(self) -> Tuple[float, ...]:
        return ()

    def continuous_parts(self) -> List[SpectralWeight]:
        c, g, m = self.center, self.scale, self.mass
        return [
            SpectralWeight(
                density=lambda t: (m * g / math.pi) / ((t - c) ** 2 + g**2),
                lower=-math.inf,
                upper=math.inf,
                center=c,
                scale=g,
            )
        ]

    def atoms(self) -> List[Tuple[float, float]]:
        return []

    @property
    def total_mass(self) -> float:
        return self.mass


@dataclass(frozen=True)
class Semicircle(ScalarHerglotzModel):
    """Wigner semicircle on ``[-halfwidth, halfwidth]``."""

    halfwidth: float = 2.0
    mass: float = 1.0

    def __post_init__(self):
        if self.halfwidth <= 0:
            raise ValueError("semicircle halfwidth must be positive")
        _check_mass(self.mass)

    def evaluate(self, z: complex) -> complex:
        z = complex(z)
        R = self.halfwidth
        if z.imag == 0 and self.on_support(z.real):
            raise BoundaryEvaluationRequiredError(f"z = {z.real} lies on [-{R}, {R}]")
        # product of principal roots: cut on [-R, R], ~z at infinity
        root = cmath.sqrt(z - R) * cmath.sqrt(z + R)
        return 2.0 * self.mass * (-z + root) / R**2

    def boundary(self, lam: float) -> complex:
        R = self.halfwidth
        if abs(lam) < R:
            return 2.0 * self.mass * complex(-lam, math.sqrt(R * R - lam * lam)) / R**2
        return self.evaluate(complex(lam, 0.0))

    def on_support(self, x: float) -> bool:
        return -self.halfwidth <= x <= self.halfwidth

    def excluded_points(self) -> Tuple[float, ...]:
        return (-self.halfwidth, self.halfwidth)

    def continuous_parts(self) -> List[SpectralWeight]:
        R, m = self.halfwidth, self.mass
        return [
            SpectralWeight(
                density=lambda t: m * 2.0 / (math.pi * R**2) * np.sqrt(np.maximum(R * R - t * t, 0.0)),
                lower=-R,
                upper=R,
            )
        ]

    def atoms(self) -> List[Tuple[float, float]]:
        return []

    @property
    def total_mass(self) -> float:
        return self.mass


@dataclass(frozen=True)
class Uniform(ScalarHerglotzModel):
    """Flat density on ``[a, b]``."""

    a: float = 0.0
    b: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError("uniform model needs a < b")
        _check_mass(self.mass)

    @property
    def height(self) -> float:
        return self.mass / (self.b - self.a)

    def evaluate(self, z: complex) -> complex:
        z = complex(z)
        if z.imag == 0 and self.on_support(z.real):
            raise BoundaryEvaluationRequiredError(f"z = {z.real} lies on [{self.a}, {self.b}]")
        return self.height * cmath.log((self.b - z) / (self.a - z))

    def boundary(self, lam: float) -> complex:
        if self.a < lam < self.b:
            # principal log of the modulus, explicit +iπ·density on the cut
            return complex(self.height * math.log((self.b - lam) / (lam - self.a)), math.pi * self.height)
        return self.evaluate(complex(lam, 0.0))

    def on_support(self, x: float) -> bool:
        return self.a <= x <= self.b

    def excluded_points(self) -> Tuple[float, ...]:
        return (self.a, self.b)

    def continuous_parts(self) -> List[SpectralWeight]:
        h = self.height
        return [SpectralWeight(density=lambda t: np.full_like(t, h, dtype=float), lower=self.a, upper=self.b)]

    def atoms(self) -> List[Tuple[float, float]]:
        return []

    @property
    def total_mass(self) -> float:
        return self.mass


@dataclass(frozen=True)
class PointMasses(ScalarHerglotzModel):
    """Finite sum of Dirac masses; weights are taken as given."""

    masses: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        masses = tuple((float(p), float(w)) for p, w in self.masses)
        if not masses:
            raise ValueError("point_masses needs at least one atom")
        if any(w <= 0 for _, w in masses):
            raise ValueError("point mass weights must be positive")
        object.__setattr__(self, "masses", masses)

    def evaluate(self, z: complex) -> complex:
        z = complex(z)
        if z.imag == 0 and self.on_support(z.real):
            raise BoundaryEvaluationRequiredError(f"z = {z.real} is an atom")
        return sum(w / (p - z) for p, w in self.masses)

    def boundary(self, lam: float) -> complex:
        return complex(sum(w / (p - lam) for p, w in self.masses))

    def on_support(self, x: float) -> bool:
        return any(x == p for p, _ in self.masses)

    def excluded_points(self) -> Tuple[float, ...]:
        return tuple(p for p, _ in self.masses)

    def continuous_parts(self) -> List[SpectralWeight]:
        return []

    def atoms(self) -> List[Tuple[float, float]]:
        return list(self.masses)

    @property
    def total_mass(self) -> float:
        return sum(w for _, w in self.masses)


@dataclass(frozen=True)
class NonnegCombination(ScalarHerglotzModel):
    """``Σ w_j F_j`` with ``w_j >= 0``."""

    terms: Tuple[Tuple[float, ScalarHerglotzModel], ...]

    def __post_init__(self):
        terms = tuple((float(w), m) for w, m in self.terms)
        if not terms:
            raise ValueError("combination needs at least one term")
        if any(w < 0 for w, _ in terms):
            raise ValueError("combination weights must be non-negative")
        object.__setattr__(self, "terms", terms)

    def _active(self) -> Iterable[Tuple[float, ScalarHerglotzModel]]:
        return ((w, m) for w, m in self.terms if w > 0)

    def evaluate(self, z: complex) -> complex:
        z = complex(z)
        if z.imag == 0 and self.on_support(z.real):
            raise BoundaryEvaluationRequiredError(f"z = {z.real} lies on the support")
        return sum((w * m.evaluate(z) for w, m in self._active()), 0j)

    def boundary(self, lam: float) -> complex:
        return sum((w * m.boundary(lam) for w, m in self._active()), 0j)

    def on_support(self, x: float) -> bool:
        return any(m.on_support(x) for _, m in self._active())

    def excluded_points(self) -> Tuple[float, ...]:
        points: List[float] = []
        for _, m in self._active():
            points.extend(m.excluded_points())
        return tuple(sorted(set(points)))

    def continuous_parts(self) -> List[SpectralWeight]:
        parts = []
        for w, m in self._active():
            for part in m.continuous_parts():
                parts.append(_scaled(part, w))
        return parts

    def atoms(self) -> List[Tuple[float, float]]:
        return [(p, w * a) for w, m in self._active() for p, a in m.atoms()]

    @property
    def total_mass(self) -> float:
        return sum(w * m.total_mass for w, m in self._active())


def _scaled(part: SpectralWeight, factor: float) -> SpectralWeight:
    density = part.density
    return SpectralWeight(
        density=lambda t: factor * density(t),
        lower=part.lower,
        upper=part.upper,
        center=part.center,
        scale=part.scale,
    )


def _check_mass(mass: float) -> None:
    if not mass > 0:
        raise ValueError("model mass must be positive")


# =============================================================================
# MATRIX MODELS
# =============================================================================


@dataclass(frozen=True, eq=False)
class MatrixHerglotzModel:
    """``A(z) = J · Σ C_m F_m(z)`` with Hermitian PSD ``C_m`` and ``J = diag(±1)``."""

    J: Tuple[int, ...]
    terms: Tuple[Tuple[NDArray[np.complex128], ScalarHerglotzModel], ...] = field(repr=False)

    MAX_DIMENSION = 8

    def __post_init__(self):
        signature = tuple(int(j) for j in self.J)
        if any(j not in (1, -1) for j in self.J):
            raise ValueError("signature entries must be ±1")
        k = len(signature)
        if not 1 <= k <= self.MAX_DIMENSION:
            raise ValueError(f"dimension k={k} outside 1..{self.MAX_DIMENSION}")
        if not self.terms:
            raise ValueError("matrix model needs at least one term")
        terms = []
        for index, (C, model) in enumerate(self.terms):
            C = np.array(C, dtype=complex)
            if C.shape != (k, k):
                raise ValueError(f"term {index}: C has shape {C.shape}, expected {(k, k)}")
            if not np.allclose(C, C.conj().T, atol=1e-12):
                raise ValueError(f"term {index}: C is not Hermitian")
            if np.linalg.eigvalsh(C).min() < -1e-12:
                raise ValueError(f"term {index}: C is not positive semidefinite")
            C.setflags(write=False)
            terms.append((C, model))
        object.__setattr__(self, "J", signature)
        object.__setattr__(self, "terms", tuple(terms))

    @property
    def k(self) -> int:
        return len(self.J)

    @property
    def signature(self) -> NDArray[np.float64]:
        return np.diag(np.asarray(self.J, dtype=float))

    def excluded_points(self) -> Tuple[float, ...]:
        return tuple(sorted({p for _, m in self.terms for p in m.excluded_points()}))

    @classmethod
    def from_scalar(cls, model: ScalarHerglotzModel, sign: int = 1) -> "MatrixHerglotzModel":
        """The k = 1 embedding of a rank-one problem."""
        return cls(J=(sign,), terms=((np.array([[1.0]]), model),))


# =============================================================================
# OPERATIONS
# =============================================================================


def _check_admissible(model, lam: float) -> None:
    for point in model.excluded_points():
        if abs(lam - point) <= EXCLUSION_TOLERANCE * (1.0 + abs(point)):
            raise MeasureZeroPointError(
                f"lambda={lam} is an excluded point of the model (atom or endpoint at {point})",
                lam=lam,
                point=point,
            )


def eval_scalar(model: ScalarHerglotzModel, z: complex) -> complex:
    """F(z) off the support, in closed form."""
    return model.evaluate(complex(z))


def eval_boundary_scalar(model: ScalarHerglotzModel, lam: float, method: str = "closed") -> complex:
    """F(lam + i0).

    ``method="closed"`` uses the variant's closed form; ``"extrapolate"``
    goes through :func:`boundary_extrapolate` on ``F(lam + iy)``.

    Raises:
        MeasureZeroPointError: lam is an atom or a support endpoint.
    """
    _check_admissible(model, lam)
    if method == "closed":
        value = complex(model.boundary(lam))
    elif method == "extrapolate":
        value = boundary_extrapolate(model.evaluate, lam).value
    else:
        raise ValueError(f"unknown boundary method: {method}")
    if -1e-12 < value.imag < 0.0:
        value = complex(value.real, 0.0)
    return value


def _combine(model: MatrixHerglotzModel, values: Sequence[complex]) -> NDArray[np.complex128]:
    total = np.zeros((model.k, model.k), dtype=complex)
    for (C, _), value in zip(model.terms, values):
        total += C * value
    return total


def eval_matrix_unsigned(model: MatrixHerglotzModel, z: complex) -> NDArray[np.complex128]:
    """``Σ C_m F_m(z)`` without the signature."""
    return _combine(model, [m.evaluate(complex(z)) for _, m in model.terms])


def eval_matrix(model: MatrixHerglotzModel, z: complex) -> NDArray[np.complex128]:
    """``A(z) = J · Σ C_m F_m(z)`` for z off the real axis."""
    return model.signature @ eval_matrix_unsigned(model, z)


def eval_matrix_boundary(model: MatrixHerglotzModel, lam: float) -> NDArray[np.complex128]:
    """``A(lam + i0)``; propagates MeasureZeroPointError from any term."""
    values = [eval_boundary_scalar(m, lam) for _, m in model.terms]
    return model.signature @ _combine(model, values)


def oracle_scalar(model: ScalarHerglotzModel, z: complex) -> complex:
    """F(z) from quadrature of the continuous parts plus exact atom sums."""
    z = complex(z)
    value = sum((adaptive_stieltjes(part, z) for part in model.continuous_parts()), 0j)
    value += sum((w / (p - z) for p, w in model.atoms()), 0j)
    return value


# =============================================================================
# SELF CHECKS
# =============================================================================


@dataclass(frozen=True)
class SelfCheckItem:
    z: complex
    check: str
    value: float
    passed: bool


@dataclass(frozen=True)
class SelfCheckReport:
    items: Tuple[SelfCheckItem, ...]

    @property
    def passed(self) -> bool:
        return all(item.passed for item in self.items)

    @property
    def failures(self) -> Tuple[SelfCheckItem, ...]:
        return tuple(item for item in self.items if not item.passed)


def herglotz_selfcheck(
    model: ScalarHerglotzModel,
    samples: Sequence[complex],
    *,
    oracle_tolerance: float = 1e-8,
) -> SelfCheckReport:
    """Positivity, conjugate symmetry and quadrature agreement at each sample."""
    items: List[SelfCheckItem] = []
    oracle_scale = max(1.0, model.total_mass)
    for z in samples:
        z = complex(z)
        if z.imag <= 0:
            raise ValueError(f"self-check samples must lie in the upper half-plane, got {z}")
        value = model.evaluate(z)
        mirrored = model.evaluate(z.conjugate())
        symmetry_gap = abs(mirrored - value.conjugate())
        oracle_gap = abs(oracle_scalar(model, z) - value)
        items.append(SelfCheckItem(z, "positivity", value.imag, value.imag >= -1e-12))
        items.append(
            SelfCheckItem(z, "conjugate_symmetry", symmetry_gap, symmetry_gap <= 1e-12 * max(1.0, abs(value)))
        )
        items.append(SelfCheckItem(z, "oracle", oracle_gap, oracle_gap <= oracle_tolerance * oracle_scale))
    report = SelfCheckReport(items=tuple(items))
    if not report.passed:
        logger.warning(
            "herglotz self-check failed",
            extra={"failures": [(str(i.z), i.check, i.value) for i in report.failures]},
        )
    return report


def matrix_imaginary_part_min(model: MatrixHerglotzModel, z: complex) -> float:
    """Smallest eigenvalue of ``Im Σ C_m F_m(z)`` (Hermitian imaginary part)."""
    B = eval_matrix_unsigned(model, z)
    hermitian_imag = (B - B.conj().T) / 2j
    return float(np.linalg.eigvalsh(hermitian_imag).min())


def matrix_herglotz_selfcheck(model: MatrixHerglotzModel, samples: Sequence[complex]) -> SelfCheckReport:
    """Positive semidefinite imaginary part of the unsigned matrix at each sample."""
    items = []
    for z in samples:
        smallest = matrix_imaginary_part_min(model, complex(z))
        items.append(SelfCheckItem(complex(z), "matrix_positivity", smallest, smallest >= -1e-10))
    for index, (_, scalar) in enumerate(model.terms):
        for item in herglotz_selfcheck(scalar, samples).items:
            items.append(SelfCheckItem(item.z, f"term{index}_{item.check}", item.value, item.passed))
    return SelfCheckReport(items=tuple(items))


def upper_half_plane_samples(rng: np.random.Generator, count: int, spread: float = 4.0) -> NDArray[np.complex128]:
    """Pseudo-random points ``x + iy`` with ``|x| <= spread`` and ``y`` log-uniform in [1e-3, 1e1]."""
    x = rng.uniform(-spread, spread, size=count)
    y = 10.0 ** rng.uniform(-3.0, 1.0, size=count)
    return x + 1j * y
