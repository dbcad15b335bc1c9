"""Scenario documents: one JSON object per verification scenario."""

import logging
from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from resonance_lab.services.herglotz_models import (
    Cauchy,
    MatrixHerglotzModel,
    NonnegCombination,
    PointMasses,
    ScalarHerglotzModel,
    Semicircle,
    Uniform,
)

logger = logging.getLogger(__name__)

CheckName = Literal[
    "eq1",
    "lorentzian",
    "trace_identity",
    "total_variation",
    "eq2",
    "ssf",
    "resonance_index",
    "continuation",
    "herglotz",
    "pushnitski",
    "phase_range",
    "limiting_absorption",
    "factorization",
]

SCENARIO_NAME_PATTERN = r"^[A-Za-z0-9_.\-]+$"


class _Spec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    @model_validator(mode="after")
    def _builds(self):
        # constructing the numerical model runs its own validation
        self.to_model()
        return self

    def to_model(self):
        raise NotImplementedError


class CauchySpec(_Spec):
    type: Literal["cauchy"]
    center: float = 0.0
    scale: float = Field(1.0, gt=0)
    mass: float = Field(1.0, gt=0)

    def to_model(self) -> ScalarHerglotzModel:
        return Cauchy(center=self.center, scale=self.scale, mass=self.mass)


class SemicircleSpec(_Spec):
    type: Literal["semicircle"]
    halfwidth: float = Field(2.0, gt=0)
    mass: float = Field(1.0, gt=0)

    def to_model(self) -> ScalarHerglotzModel:
        return Semicircle(halfwidth=self.halfwidth, mass=self.mass)


class UniformSpec(_Spec):
    type: Literal["uniform"]
    a: float = 0.0
    b: float = 1.0
    mass: float = Field(1.0, gt=0)

    def to_model(self) -> ScalarHerglotzModel:
        return Uniform(a=self.a, b=self.b, mass=self.mass)


class PointMassesSpec(_Spec):
    type: Literal["point_masses"]
    masses: List[Tuple[float, float]] = Field(..., min_length=1, description="(position, weight) pairs")

    def to_model(self) -> ScalarHerglotzModel:
        return PointMasses(masses=tuple(self.masses))


class WeightedTerm(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    weight: float = Field(..., ge=0)
    model: "ScalarModelSpec"


class CombinationSpec(_Spec):
    type: Literal["combination"]
    terms: List[WeightedTerm] = Field(..., min_length=1)

    def to_model(self) -> ScalarHerglotzModel:
        return NonnegCombination(terms=tuple((t.weight, t.model.to_model()) for t in self.terms))


ScalarModelSpec = Annotated[
    Union[CauchySpec, SemicircleSpec, UniformSpec, PointMassesSpec, CombinationSpec],
    Field(discriminator="type"),
]

WeightedTerm.model_rebuild()

# matrix entries are reals or [re, im] pairs
MatrixEntry = Union[float, Tuple[float, float]]


def _complex_matrix(rows: List[List[MatrixEntry]]) -> np.ndarray:
    return np.array(
        [[complex(*e) if isinstance(e, (tuple, list)) else complex(e) for e in row] for row in rows],
        dtype=complex,
    )


class MatrixTerm(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    C: List[List[MatrixEntry]]
    model: ScalarModelSpec


class MatrixSpec(_Spec):
    type: Literal["matrix"]
    J: List[int] = Field(..., min_length=1)
    terms: List[MatrixTerm] = Field(..., min_length=1)

    @field_validator("J")
    @classmethod
    def validate_signature(cls, v: List[int]) -> List[int]:
        if any(j not in (1, -1) for j in v):
            raise ValueError("signature entries must be ±1")
        return v

    def to_model(self) -> MatrixHerglotzModel:
        return MatrixHerglotzModel(
            J=tuple(self.J),
            terms=tuple((_complex_matrix(t.C), t.model.to_model()) for t in self.terms),
        )


ModelSpec = Annotated[
    Union[CauchySpec, SemicircleSpec, UniformSpec, PointMassesSpec, CombinationSpec, MatrixSpec],
    Field(discriminator="type"),
]


class Scenario(BaseModel):
    """A model, a λ grid, a coupling interval and the checks to run on them."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str = Field(..., min_length=1, max_length=120, pattern=SCENARIO_NAME_PATTERN)
    model: ModelSpec
    lambda_grid: List[float] = Field(..., min_length=1)
    interval: Tuple[float, float] = (0.0, 1.0)
    checks: List[CheckName] = Field(..., min_length=1)
    tolerances: Dict[CheckName, float] = Field(default_factory=dict)
    coupling: Optional[float] = Field(
        None, description="Coupling for pointwise checks; defaults to the interval midpoint"
    )
    description: str = ""

    @field_validator("tolerances")
    @classmethod
    def validate_tolerances(cls, v: Dict[str, float]) -> Dict[str, float]:
        negative = sorted(k for k, tol in v.items() if not tol >= 0)
        if negative:
            raise ValueError(f"tolerances must be non-negative: {', '.join(negative)}")
        return v

    @field_validator("checks")
    @classmethod
    def dedupe_checks(cls, v: List[str]) -> List[str]:
        return sorted(set(v))

    @model_validator(mode="after")
    def validate_interval(self):
        a, b = self.interval
        if not a <= b:
            raise ValueError(f"interval must satisfy a <= b, got [{a}, {b}]")
        return self

    @property
    def is_matrix(self) -> bool:
        return isinstance(self.model, MatrixSpec)

    @property
    def pointwise_coupling(self) -> float:
        if self.coupling is not None:
            return self.coupling
        a, b = self.interval
        return 0.5 * (a + b)
