"""Structured logging for lastmult, built on structlog."""

import logging
import sys
from typing import Any, Dict, MutableMapping, Optional

import structlog
from structlog._config import BoundLoggerLazyProxy

from ..utils.formatting import ReportFormatter
from ..utils.validation import DEFAULT_LOG_LEVEL, ConfigValidator


_formatter = ReportFormatter()
_validator = ConfigValidator()


def sanitize_fields(
    logger: Any, name: str, event_dict: MutableMapping[str, Any]
) -> MutableMapping[str, Any]:
    """Processor: make event fields printable (numpy scalars, points, arrays)."""
    event = event_dict.pop("event", "")
    cleaned: Dict[str, Any] = _formatter.ensure_fields(dict(event_dict))
    event_dict.clear()
    event_dict["event"] = event
    event_dict.update(cleaned)
    return event_dict


def configure_logging(level: str = DEFAULT_LOG_LEVEL, stream: Optional[Any] = None) -> str:
    """Install the processor chain; log lines go to stderr by default."""
    validated = _validator.validate_log_level(level)

    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            sanitize_fields,
            structlog.dev.ConsoleRenderer(colors=False),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(
            getattr(logging, validated)
        ),
        logger_factory=structlog.PrintLoggerFactory(file=stream or sys.stderr),
        cache_logger_on_first_use=False,
    )

    return validated


def get_logger(name: Optional[str] = None, **context: Any) -> Any:
    """Return a lazy logger carrying ``context``; configures defaults if needed.

    The proxy resolves the configuration on every call, so a later
    ``configure_logging`` also applies to module-level loggers.
    """
    if not structlog.is_configured():
        configure_logging()

    initial: Dict[str, Any] = dict(context)
    if name:
        initial["logger"] = name
    # Same proxy as structlog.get_logger(**initial); passing the dict avoids
    # the "logger" key colliding with wrap_logger's positional parameter.
    return BoundLoggerLazyProxy(None, initial_values=initial)
