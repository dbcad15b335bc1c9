"""Exception hierarchy for the lab.

Every error raised by a numerical module carries a machine-readable
``reason_code``. The scenario runner turns these into skipped report rows
instead of crashing a sweep.
"""

import hashlib
import logging
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)


class LabError(Exception):
    """Base class for all lab errors."""

    reason_code = "LAB_ERROR"

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context: Dict[str, Any] = context

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": type(self).__name__,
            "reason": self.reason_code,
            "message": self.message,
            **{k: _jsonable(v) for k, v in self.context.items()},
        }


def _jsonable(value: Any) -> Any:
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


# =============================================================================
# NUMERICS
# =============================================================================


class RootFindingError(LabError, ArithmeticError):
    """Simultaneous iteration hit its cap without meeting the residual test."""

    reason_code = "ROOT_NOT_CONVERGED"

    def __init__(self, message: str, best_iterate: Any, residual: float):
        super().__init__(message, residual=residual)
        self.best_iterate = best_iterate
        self.residual = residual


class QuadratureBudgetError(LabError, ArithmeticError):
    reason_code = "QUADRATURE_BUDGET"

    def __init__(self, message: str, estimate: complex, error_estimate: float):
        super().__init__(message, estimate=estimate, error_estimate=error_estimate)
        self.estimate = estimate
        self.error_estimate = error_estimate


class RefinementNeededError(LabError):
    """Adjacent phase samples are too far apart to unwrap safely."""

    reason_code = "GRID_REFINEMENT"

    def __init__(self, message: str, index: int):
        super().__init__(message, index=index)
        self.index = index


class ExtrapolationDivergenceError(LabError, ArithmeticError):
    """Boundary values do not settle as y -> 0+; lambda is a bad point."""

    reason_code = "EXTRAPOLATION_DIVERGED"


# =============================================================================
# MODELS
# =============================================================================


class BoundaryEvaluationRequiredError(LabError, ValueError):
    reason_code = "BOUNDARY_EVALUATION_REQUIRED"


class MeasureZeroPointError(LabError, ValueError):
    """Lambda is an atom or a support endpoint of the spectral measure."""

    reason_code = "MEASURE_ZERO_POINT"


# =============================================================================
# ENGINES
# =============================================================================


class NoFiniteResonanceError(LabError):
    reason_code = "NO_FINITE_RESONANCE"


class AtRealResonanceError(LabError):
    reason_code = "REAL_RESONANCE"


class SplitRequiredError(LabError):
    """A real resonance point lies inside the requested coupling interval."""

    reason_code = "REAL_RESONANCE"

    def __init__(self, message: str, location: float):
        super().__init__(message, location=location)
        self.location = location


class NotApplicableError(LabError):
    reason_code = "NOT_APPLICABLE"


class SingularityError(LabError):
    reason_code = "SINGULARITY"


class EndpointAmbiguityError(LabError):
    reason_code = "ENDPOINT_RESONANCE"


class NotAResonanceError(LabError):
    reason_code = "NOT_A_RESONANCE"


class IndexResolutionError(LabError):
    reason_code = "UNSTABLE_INDEX"

    def __init__(self, message: str, counts: Any):
        super().__init__(message, counts=counts)
        self.counts = counts


# =============================================================================
# CONFIGURATION
# =============================================================================


class ScenarioConfigError(LabError, ValueError):
    """Scenario file could not be parsed or validated."""

    reason_code = "CONFIG_ERROR"

    def __init__(self, message: str, location: Optional[str] = None):
        super().__init__(message, location=location)
        self.location = location


def incident_id(*parts: Any) -> str:
    """Deterministic incident id for a skipped row."""
    key = "|".join(str(p) for p in parts)
    return "inc_" + hashlib.md5(key.encode()).hexdigest()[:10]
