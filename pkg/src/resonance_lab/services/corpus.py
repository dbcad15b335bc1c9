"""Bundled scenarios plus a seeded corpus of random matrix models.

All randomness flows through one ``numpy.random.Generator`` seeded from
``LAB_SEED``, so the same seed always yields the same corpus.
"""

import logging
from importlib import resources
from typing import Any, Dict, List, Optional

import numpy as np

from resonance_lab.config.settings import get_settings
from resonance_lab.models.scenario_models import Scenario
from resonance_lab.services.scenario_runner import parse_scenario

logger = logging.getLogger(__name__)

SCENARIO_PACKAGE = "resonance_lab.scenarios"
RANDOM_CHECKS = ["eq2", "factorization", "herglotz", "ssf"]
# every scalar family below has λ in (-0.4, 0.4) strictly inside its support
LAMBDA_RANGE = 0.4
LAMBDA_POINTS = 5


def bundled_scenarios() -> List[Scenario]:
    """Scenario files shipped with the package, in file-name order."""
    entries = sorted(
        (e for e in resources.files(SCENARIO_PACKAGE).iterdir() if e.name.endswith(".json")),
        key=lambda e: e.name,
    )
    return [parse_scenario(e.read_text(encoding="utf-8"), source=e.name) for e in entries]


def _round(x: float) -> float:
    return round(float(x), 6)


def _random_scalar(rng: np.random.Generator) -> Dict[str, Any]:
    family = rng.integers(3)
    if family == 0:
        return {
            "type": "cauchy",
            "center": _round(rng.uniform(-1.0, 1.0)),
            "scale": _round(rng.uniform(0.5, 1.5)),
            "mass": _round(rng.uniform(0.5, 1.5)),
        }
    if family == 1:
        return {
            "type": "semicircle",
            "halfwidth": _round(rng.uniform(1.5, 3.0)),
            "mass": _round(rng.uniform(0.5, 1.5)),
        }
    return {
        "type": "uniform",
        "a": _round(rng.uniform(-2.0, -0.5)),
        "b": _round(rng.uniform(0.5, 2.0)),
        "mass": _round(rng.uniform(0.5, 1.5)),
    }


def _random_psd(rng: np.random.Generator, k: int) -> List[List[float]]:
    G = rng.normal(size=(k, k))
    # diagonal shift keeps C positive definite after rounding
    C = np.round(G @ G.T / k + 0.05 * np.eye(k), 6)
    C = np.triu(C) + np.triu(C, 1).T
    return [[float(x) for x in row] for row in C]


def _random_signature(rng: np.random.Generator, k: int, mixed: bool) -> List[int]:
    if not mixed:
        return [1] * k
    signature = [int(j) for j in rng.choice([-1, 1], size=k)]
    if all(j == 1 for j in signature):
        signature[int(rng.integers(k))] = -1
    return signature


def random_matrix_scenario_documents(seed: int, count: int) -> List[Dict[str, Any]]:
    """Documents for ``count`` random models; odd entries use an indefinite signature."""
    rng = np.random.default_rng(seed)
    documents = []
    for index in range(count):
        k = int(rng.integers(1, 4))
        n_terms = int(rng.integers(1, 3))
        lambdas = sorted({_round(x) for x in rng.uniform(-LAMBDA_RANGE, LAMBDA_RANGE, size=LAMBDA_POINTS)})
        a = _round(rng.uniform(-3.0, 0.0))
        b = _round(rng.uniform(0.0, 3.0))
        documents.append(
            {
                "name": f"random_{seed}_{index:02d}",
                "model": {
                    "type": "matrix",
                    "J": _random_signature(rng, k, mixed=index % 2 == 1),
                    "terms": [{"C": _random_psd(rng, k), "model": _random_scalar(rng)} for _ in range(n_terms)],
                },
                "lambda_grid": lambdas,
                "interval": [a, b],
                "checks": RANDOM_CHECKS,
            }
        )
    return documents


def random_matrix_scenarios(seed: Optional[int] = None, count: Optional[int] = None) -> List[Scenario]:
    current = get_settings()
    seed = current.SEED if seed is None else seed
    count = current.CORPUS_SIZE if count is None else count
    return [Scenario.model_validate(d) for d in random_matrix_scenario_documents(seed, count)]


def corpus_scenarios(seed: Optional[int] = None, count: Optional[int] = None) -> List[Scenario]:
    scenarios = bundled_scenarios() + random_matrix_scenarios(seed, count)
    logger.info("corpus assembled", extra={"scenarios": len(scenarios)})
    return scenarios
