"""Handlers behind the ``lab`` subcommands. Each returns the process exit code."""

import argparse
import logging
import sys

from resonance_lab.config.env_validator import CONFIG_ERROR_EXIT_CODE
from resonance_lab.config.settings import get_settings
from resonance_lab.services.scenario_runner import ScenarioRun

logger = logging.getLogger(__name__)


def _report(run: ScenarioRun) -> int:
    summary = run.summary
    print(
        f"{summary.run_id}: {summary.passed} passed, {summary.failed} failed, {summary.skipped} skipped",
        file=sys.stdout,
    )
    for path in run.paths:
        print(f"  {path}", file=sys.stdout)
    return run.exit_code


def _config_error(message: str) -> int:
    logger.error("configuration error", extra={"detail": message})
    print(f"error: {message}", file=sys.stderr)
    return CONFIG_ERROR_EXIT_CODE


def run_command(args: argparse.Namespace) -> int:
    from resonance_lab.services.scenario_runner import load_scenario, run_scenario
    from resonance_lab.utils.exceptions import ScenarioConfigError

    if args.jobs is not None and args.jobs < 1:
        return _config_error("--jobs must be at least 1")
    try:
        scenario = load_scenario(args.scenario)
    except ScenarioConfigError as e:
        return _config_error(e.message)
    out_dir = args.out or get_settings().OUT_DIR
    return _report(run_scenario(scenario, out_dir=out_dir, jobs=args.jobs))


def corpus_command(args: argparse.Namespace) -> int:
    from resonance_lab.services.corpus import corpus_scenarios
    from resonance_lab.services.scenario_runner import run_scenarios
    from resonance_lab.utils.exceptions import ScenarioConfigError

    if args.jobs is not None and args.jobs < 1:
        return _config_error("--jobs must be at least 1")
    try:
        scenarios = corpus_scenarios()
    except ScenarioConfigError as e:
        return _config_error(e.message)
    out_dir = args.out or get_settings().OUT_DIR
    return _report(run_scenarios(scenarios, out_dir=out_dir, stem="corpus", jobs=args.jobs))


def trace_command(args: argparse.Namespace) -> int:
    from resonance_lab.services.scenario_runner import export_trace, load_scenario
    from resonance_lab.utils.exceptions import NotApplicableError, ScenarioConfigError

    if args.samples < 2:
        return _config_error("--samples must be at least 2")
    try:
        scenario = load_scenario(args.scenario)
        path = export_trace(scenario, args.samples, args.out or get_settings().OUT_DIR)
    except (ScenarioConfigError, NotApplicableError) as e:
        return _config_error(e.message)
    print(path, file=sys.stdout)
    return 0
