"""Structured logging configuration.

Every record carries the current run id, so all lines of one scenario run
can be correlated (``jq 'select(.run_id == "run_...")'``).
"""

import json
import logging
import sys
from contextvars import ContextVar
from datetime import datetime, timezone
from typing import Optional

run_id_var: ContextVar[Optional[str]] = ContextVar("run_id", default=None)

_RESERVED = set(vars(logging.makeLogRecord({}))) | {"message", "asctime", "run_id"}


class RunIdFilter(logging.Filter):
    """Stamp the active run id on each record."""

    def filter(self, record: logging.LogRecord) -> bool:
        record.run_id = run_id_var.get()
        return True


class JsonFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        payload = {
            "timestamp": datetime.fromtimestamp(record.created, tz=timezone.utc)
            .isoformat()
            .replace("+00:00", "Z"),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "run_id": getattr(record, "run_id", None),
        }
        for key, value in record.__dict__.items():
            if key not in _RESERVED and not key.startswith("_"):
                payload[key] = value
        if record.exc_info:
            payload["exception"] = self.formatException(record.exc_info)
        return json.dumps(payload, default=str)


def setup_logging(level: Optional[str] = None, fmt: Optional[str] = None) -> None:
    """Configure the root logger. Safe to call more than once."""
    from pydantic import ValidationError

    from resonance_lab.config.settings import get_settings

    try:
        current = get_settings()
        level = level or current.LOG_LEVEL
        fmt = fmt or current.LOG_FORMAT
    except ValidationError:
        # env_validator reports the details right after this
        level = level or "INFO"
        fmt = fmt or "json"

    handler = logging.StreamHandler(sys.stderr)
    handler.addFilter(RunIdFilter())
    if fmt == "json":
        handler.setFormatter(JsonFormatter())
    else:
        handler.setFormatter(
            logging.Formatter("%(asctime)s %(levelname)s %(name)s [%(run_id)s] %(message)s")
        )

    root = logging.getLogger()
    for existing in list(root.handlers):
        root.removeHandler(existing)
    root.addHandler(handler)
    root.setLevel(level)

    # mlflow is chatty at INFO
    logging.getLogger("mlflow").setLevel(logging.WARNING)
