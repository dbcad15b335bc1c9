"""Command-line entry point for ``lab``."""

from typing import Optional, Sequence


def main(argv: Optional[Sequence[str]] = None) -> int:
    # Configure logging FIRST (before any other imports that might log)
    from resonance_lab.config.logging_config import setup_logging

    setup_logging()

    # Validate environment before anything else
    from resonance_lab.config.env_validator import validate_environment_on_startup

    validate_environment_on_startup()

    from resonance_lab.cli.app import create_parser

    args = create_parser().parse_args(argv)
    return args.handler(args)


if __name__ == "__main__":
    raise SystemExit(main())
