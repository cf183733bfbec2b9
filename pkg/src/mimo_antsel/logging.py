"""Logging configuration for massive-mimo-antsel."""

import logging
import logging.config
import uuid
from pathlib import Path
from typing import Any

import structlog

LOG_FILE_NAME = "antsel.log"


def _file_handler(log_dir: Path | None) -> dict[str, Any] | None:
    """Rotating JSON file handler config, or None if the directory is unusable."""
    if log_dir is None:
        return None
    try:
        log_dir.mkdir(parents=True, exist_ok=True)
    except OSError:
        return None
    return {
        "class": "logging.handlers.RotatingFileHandler",
        "formatter": "json",
        "filename": str(log_dir / LOG_FILE_NAME),
        "maxBytes": 10 * 1024 * 1024,  # 10 MB
        "backupCount": 5,
        "encoding": "utf-8",
    }


def setup_logging(verbose: bool = False, log_dir: Path | None = None) -> str:
    """Configure structured logging.

    Events go to a JSON log file under log_dir. The console renderer is attached only in
    verbose mode, or when the log directory cannot be created.

    Args:
        verbose: If True, set log level to DEBUG and log to stderr as well
        log_dir: Directory for antsel.log

    Returns:
        The run id bound to every event of this execution
    """
    log_level = logging.DEBUG if verbose else logging.INFO

    processors: list[Any] = [
        structlog.contextvars.merge_contextvars,
        structlog.processors.add_log_level,
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
        structlog.processors.UnicodeDecoder(),
    ]

    handlers: dict[str, Any] = {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "plain",
            "stream": "ext://sys.stderr",
        },
    }
    file_handler = _file_handler(log_dir)
    active = []
    if file_handler is not None:
        handlers["file"] = file_handler
        active.append("file")
    if verbose or file_handler is None:
        active.append("console")

    logging.config.dictConfig(
        {
            "version": 1,
            "disable_existing_loggers": False,
            "formatters": {
                "plain": {
                    "()": structlog.stdlib.ProcessorFormatter,
                    "processors": processors + [structlog.dev.ConsoleRenderer(colors=True)],
                },
                "json": {
                    "()": structlog.stdlib.ProcessorFormatter,
                    "processors": processors + [structlog.processors.JSONRenderer()],
                },
            },
            "handlers": handlers,
            "loggers": {
                "": {"handlers": active, "level": log_level, "propagate": True},
                "mimo_antsel": {"handlers": active, "level": log_level, "propagate": False},
            },
        }
    )

    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.stdlib.ProcessorFormatter.wrap_for_formatter,
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )

    run_id = str(uuid.uuid4())
    structlog.contextvars.clear_contextvars()
    structlog.contextvars.bind_contextvars(run_id=run_id)
    return run_id
