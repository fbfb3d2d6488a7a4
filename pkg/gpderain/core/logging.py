"""Structured logging configuration for gpderain."""

import logging
import sys
from typing import Any, Optional

try:
    from json_log_formatter import JSONFormatter
except ImportError:
    JSONFormatter = None  # type: ignore

LOG_LEVEL_ENV = "GPDERAIN_LOG_LEVEL"

# Rendered first and in this order; any other `extra=` field follows sorted by name.
_LEADING_KEYS = ("run_name", "epoch", "step", "domain", "image_id")
_SHORT_NAMES = {"run_name": "run"}

_RECORD_ATTRS = frozenset(
    logging.LogRecord("", logging.INFO, "", 0, "", None, None).__dict__
) | {"message", "asctime", "taskName"}


def record_fields(record: logging.LogRecord) -> dict[str, Any]:
    """The `extra=` fields attached to a record, leading keys first."""
    fields = {k: v for k, v in record.__dict__.items() if k not in _RECORD_ATTRS}
    ordered = {k: fields.pop(k) for k in _LEADING_KEYS if k in fields}
    ordered.update(sorted(fields.items()))
    return ordered


def configure_logging(
    level: str = "INFO",
    json_format: bool = False,
    run_name: Optional[str] = None,
) -> None:
    """Configure the `gpderain` logger.

    Logs go to stderr so command output on stdout stays machine-readable.

    Args:
        level: Log level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        json_format: One JSON object per line instead of the key=value format
        run_name: Stamped on every record that does not carry its own
    """
    log_level = getattr(logging, level.upper(), logging.INFO)

    logger = logging.getLogger("gpderain")
    logger.setLevel(log_level)
    logger.handlers.clear()

    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(log_level)

    if json_format:
        if JSONFormatter is None:
            raise ImportError(
                "json-log-formatter is required for JSON logging. "
                "Install it with: pip install json-log-formatter"
            )
        formatter: logging.Formatter = RunJSONFormatter()
    else:
        formatter = StructuredFormatter()

    handler.setFormatter(formatter)
    if run_name:
        handler.addFilter(_RunNameFilter(run_name))
    logger.addHandler(handler)


class _RunNameFilter(logging.Filter):
    def __init__(self, run_name: str):
        super().__init__()
        self.run_name = run_name

    def filter(self, record: logging.LogRecord) -> bool:
        if not hasattr(record, "run_name"):
            record.run_name = self.run_name
        return True


class StructuredFormatter(logging.Formatter):
    """`[LEVEL] run=... epoch=... key=value message` lines."""

    def format(self, record: logging.LogRecord) -> str:
        parts = [f"[{record.levelname}]"]
        for key, value in record_fields(record).items():
            parts.append(f"{_SHORT_NAMES.get(key, key)}={value}")
        parts.append(record.getMessage())
        line = " ".join(parts)
        if record.exc_info:
            line = f"{line}\n{self.formatException(record.exc_info)}"
        return line


if JSONFormatter is not None:

    class RunJSONFormatter(JSONFormatter):
        """JSON records with the level and logger name next to the extra fields."""

        def json_record(
            self, message: str, extra: dict[str, Any], record: logging.LogRecord
        ) -> dict[str, Any]:
            payload = super().json_record(message, extra, record)
            payload["level"] = record.levelname
            payload["logger"] = record.name
            return payload

else:
    RunJSONFormatter = None  # type: ignore
