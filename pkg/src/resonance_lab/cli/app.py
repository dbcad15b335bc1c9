"""Argument parser factory for the ``lab`` command."""

import argparse

from resonance_lab.cli import commands


def create_parser() -> argparse.ArgumentParser:
    """Create the ``lab`` parser with its ``run``, ``corpus`` and ``trace`` subcommands."""
    parser = argparse.ArgumentParser(
        prog="lab",
        description="Verify resonance-point, scattering-phase and spectral-shift identities.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    run = subparsers.add_parser("run", help="run the checks of one scenario file")
    run.add_argument("scenario", help="path to a scenario JSON document")
    run.add_argument("--out", default=None, help="report directory (default: LAB_OUT_DIR)")
    run.add_argument("--jobs", type=int, default=None, help="parallel check rows (default: LAB_JOBS)")
    run.set_defaults(handler=commands.run_command)

    corpus = subparsers.add_parser("corpus", help="run the bundled scenarios and the seeded random corpus")
    corpus.add_argument("--out", default=None, help="report directory (default: LAB_OUT_DIR)")
    corpus.add_argument("--jobs", type=int, default=None, help="parallel check rows (default: LAB_JOBS)")
    corpus.set_defaults(handler=commands.corpus_command)

    trace = subparsers.add_parser("trace", help="write the phase and its derivatives over the coupling interval")
    trace.add_argument("scenario", help="path to a scenario JSON document with a scalar model")
    trace.add_argument("--check", choices=["lorentzian"], default="lorentzian")
    trace.add_argument("--samples", type=int, default=101, help="couplings per lambda")
    trace.add_argument("--out", default=None, help="output directory (default: LAB_OUT_DIR)")
    trace.set_defaults(handler=commands.trace_command)

    return parser
