"""Adaptive grids in the coupling constant.

Refinement is driven by the log-derivative ``g(s) = d/ds log det(1 + sA)``
(for rank one, ``F / (1 + sF)``): an interval of width ``h`` is accepted
once ``h·|g| < π/8`` at both ends. A pole within half a width of the
interval forces ``h·|g| ≳ 2``, so no resonance can hide between nodes and
the phase increments stay far below the unwrapping limit.
"""

import cmath
import logging
import math
from typing import Callable, Iterable, List

import numpy as np
from numpy.typing import NDArray

from resonance_lab.config.settings import NumericsConfig
from resonance_lab.utils.exceptions import RefinementNeededError, SplitRequiredError

logger = logging.getLogger(__name__)


def _magnitude(value: complex) -> float:
    return abs(value) if cmath.isfinite(value) else math.inf


def refine_coupling_grid(
    log_derivative: Callable[[float], complex],
    a: float,
    b: float,
    *,
    include: Iterable[float] = (),
    initial_points: int = NumericsConfig.GRID_INITIAL_POINTS,
    phase_step: float = NumericsConfig.GRID_PHASE_STEP,
    min_relative_width: float = NumericsConfig.GRID_MIN_RELATIVE_WIDTH,
    max_points: int = NumericsConfig.GRID_MAX_POINTS,
) -> NDArray[np.float64]:
    """Strictly increasing grid on ``[a, b]`` that resolves every pole nearby.

    Raises:
        SplitRequiredError: an interval shrank below ``min_relative_width``
            without meeting the bound; a real resonance sits there.
        RefinementNeededError: the grid outgrew ``max_points``.
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("coupling grids need finite endpoints")
    if a > b:
        raise ValueError(f"empty coupling interval [{a}, {b}]")
    if a == b:
        return np.array([a])

    seed = set(np.linspace(a, b, initial_points).tolist())
    seed.update(x for x in include if a <= x <= b)
    seed_points = sorted(seed)
    values = [_magnitude(log_derivative(s)) for s in seed_points]

    grid: List[float] = [seed_points[0]]
    stack = [
        (seed_points[i], seed_points[i + 1], values[i], values[i + 1])
        for i in reversed(range(len(seed_points) - 1))
    ]
    while stack:
        s0, s1, g0, g1 = stack.pop()
        width = s1 - s0
        if width * max(g0, g1) < phase_step:
            grid.append(s1)
            continue
        mid = 0.5 * (s0 + s1)
        if width < min_relative_width * (1.0 + max(abs(s0), abs(s1))):
            raise SplitRequiredError(
                f"real resonance near coupling {mid:.12g}; split the interval there",
                location=mid,
            )
        gm = _magnitude(log_derivative(mid))
        stack.append((mid, s1, gm, g1))
        stack.append((s0, mid, g0, gm))
        if len(grid) + len(stack) > max_points:
            raise RefinementNeededError(
                f"coupling grid on [{a}, {b}] exceeded {max_points} points",
                index=len(grid),
            )

    logger.debug("refined coupling grid", extra={"a": a, "b": b, "points": len(grid)})
    return np.asarray(grid)
