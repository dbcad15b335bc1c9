"""Fail-fast validation of the runtime environment."""

import logging
import os
from typing import List

from pydantic import ValidationError

logger = logging.getLogger(__name__)

CONFIG_ERROR_EXIT_CODE = 2


def collect_environment_problems() -> List[str]:
    """Return a list of human-readable problems with the LAB_* environment."""
    from resonance_lab.config.settings import Settings

    problems: List[str] = []
    try:
        current = Settings()
    except ValidationError as exc:
        for error in exc.errors():
            field = ".".join(str(p) for p in error.get("loc", ())) or "settings"
            problems.append(f"LAB_{field}: {error.get('msg')}")
        return problems

    out_dir = os.path.abspath(current.OUT_DIR)
    parent = out_dir if os.path.isdir(out_dir) else os.path.dirname(out_dir)
    if os.path.exists(parent) and not os.access(parent, os.W_OK):
        problems.append(f"LAB_OUT_DIR: {out_dir} is not writable")

    return problems


def validate_environment_on_startup() -> None:
    """Exit with code 2 when the environment is invalid."""
    problems = collect_environment_problems()
    if not problems:
        logger.debug("environment validated")
        return
    for problem in problems:
        logger.error("invalid environment", extra={"problem": problem})
    raise SystemExit(CONFIG_ERROR_EXIT_CODE)
