"""Application settings and numerical configuration."""

from functools import lru_cache
from typing import Literal, Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Runtime settings, read from ``LAB_*`` environment variables or ``.env``."""

    model_config = SettingsConfigDict(
        env_prefix="LAB_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    SEED: int = Field(0, ge=0, description="Seed of the corpus generator")
    OUT_DIR: str = "reports"
    JOBS: int = Field(1, ge=1, le=256)
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: Literal["json", "text"] = "json"

    MLFLOW_TRACKING_URI: Optional[str] = None
    MLFLOW_EXPERIMENT: str = "resonance-lab"

    METRICS_ENABLED: bool = True
    CORPUS_SIZE: int = Field(20, ge=1, le=1000)

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        level = v.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"unknown log level: {v}")
        return level


class NumericsConfig:
    """Fixed numerical schedules; kept constant for reproducible output."""

    # boundary_extrapolate
    EXTRAPOLATION_Y0 = 1e-2
    EXTRAPOLATION_LEVELS = 20
    EXTRAPOLATION_MAX_ERROR = 1e-6

    # poly_roots
    ROOT_MAX_ITERATIONS = 500
    ROOT_STEP_TOLERANCE = 1e-14
    ROOT_ANGLE_OFFSET = 0.4142135623730951  # sqrt(2) - 1

    # small_eigenvalues
    MAX_EIGEN_DIMENSION = 16
    CLUSTER_TOLERANCE = 1e-7
    CLUSTER_BACKWARD_ERROR = 1e-13

    # adaptive_stieltjes
    QUADRATURE_TOLERANCE = 1e-8
    QUADRATURE_ORDER = 16
    QUADRATURE_MAX_PANELS = 20000

    # unwrap_phase
    UNWRAP_MAX_JUMP = 1.5707963267948966  # pi / 2

    # coupling grids
    GRID_INITIAL_POINTS = 33
    GRID_PHASE_STEP = 0.39269908169872414  # pi / 8
    GRID_MIN_RELATIVE_WIDTH = 1e-10
    GRID_MAX_POINTS = 200000

    # rank one engine
    EPS_REAL = 1e-10
    SCATTERING_DENOMINATOR_FLOOR = 1e-13
    FD_STEP = 1e-4
    FD_TOLERANCE = 1e-6
    CONTINUATION_RADIUS = 1e-4
    CONTINUATION_SAMPLES = 16
    CONTINUATION_POLE_BOUND = 1e3
    CONTINUATION_ZERO_BOUND = 1e-3

    # finite rank engine
    ZERO_EIGENVALUE_TOLERANCE = 1e-12
    INDEX_Y_LEVELS = (1e-2, 1e-3, 1e-4)
    INDEX_DISC_FACTOR = 10.0
    INDEX_INTEGER_TOLERANCE = 1e-6

    # ssf_from_phase
    SSF_PHASE_Y0 = 1e-4
    SSF_PHASE_LEVELS = 8


class CheckTolerances:
    """Default tolerance per scenario check."""

    DEFAULTS = {
        "eq1": 1e-6,
        "lorentzian": 1e-6,
        "trace_identity": 1e-10,
        "total_variation": 1e-12,
        "eq2": 1e-6,
        "ssf": 1e-8,
        "resonance_index": 0.0,
        "continuation": 0.0,
        "herglotz": 0.0,
        "pushnitski": 1e-8,
        "phase_range": 0.0,
        "limiting_absorption": 0.0,
        "factorization": 1e-8,
    }

    @classmethod
    def get(cls, check: str) -> float:
        return cls.DEFAULTS[check]


@lru_cache
def get_settings() -> Settings:
    """Settings built once from the current environment."""
    return Settings()
