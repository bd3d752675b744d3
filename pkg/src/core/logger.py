"""
Logging configuration for the WaveGuard tool.

Every run writes JSON lines to a per-command file and mirrors them on stderr,
either through rich or as raw JSON. stdout carries command results only.
"""

import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Optional
import structlog
from rich.console import Console
from rich.logging import RichHandler

_PROCESSORS = [
    structlog.stdlib.filter_by_level,
    structlog.stdlib.add_logger_name,
    structlog.stdlib.add_log_level,
    structlog.stdlib.PositionalArgumentsFormatter(),
    structlog.processors.TimeStamper(fmt="iso"),
    structlog.processors.StackInfoRenderer(),
    structlog.processors.format_exc_info,
    structlog.processors.UnicodeDecoder(),
    structlog.processors.JSONRenderer(),
]


def log_file_path(service_name: str, feature: str, logs_dir: str = "logs") -> Path:
    """``<logs_dir>/<feature>/waveguard-<service>-<YYYY-mm-dd-HH>.log``; creates the directory."""
    folder = Path(logs_dir) / feature
    folder.mkdir(parents=True, exist_ok=True)
    return folder / f"waveguard-{service_name}-{datetime.now():%Y-%m-%d-%H}.log"


def _console_handler(json_console: bool) -> logging.Handler:
    if json_console:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter('%(message)s'))
        return handler
    # markup off: transcripts and file paths may contain [brackets]
    return RichHandler(
        console=Console(stderr=True),
        show_time=True,
        show_path=False,
        markup=False,
        rich_tracebacks=True
    )


def setup_logger(service_name: str, feature: str, log_level: str = "INFO", json_console: bool = False,
                 logs_dir: str = "logs") -> structlog.stdlib.BoundLogger:
    """
    Set up structured logging for one WaveGuard command.

    Args:
        service_name: Name of the component (e.g., 'evaluate')
        feature: Feature name for log file organization
        log_level: Logging level
        json_console: If True, output single-line JSON on stderr instead of rich
        logs_dir: Root directory for log files

    Returns:
        Configured logger instance
    """
    log_filepath = log_file_path(service_name, feature, logs_dir)
    level = getattr(logging, log_level.upper())

    structlog.configure(
        processors=_PROCESSORS,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )

    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    # A second run in the same process (tests, notebooks) must not stack handlers.
    for handler in list(root_logger.handlers):
        root_logger.removeHandler(handler)
        handler.close()

    for handler in (logging.FileHandler(log_filepath), _console_handler(json_console)):
        handler.setLevel(level)
        root_logger.addHandler(handler)

    logger = structlog.get_logger(service_name)
    logger.debug(
        "Logger initialized",
        service=service_name,
        feature=feature,
        log_file=str(log_filepath),
        log_level=log_level,
        json_console=json_console
    )
    return logger


class LoggerMixin:
    """Mixin class to add logging capabilities to long-lived components."""

    def __init__(self, service_name: str, logger: Optional[structlog.stdlib.BoundLogger] = None):
        self.logger = logger if logger is not None else structlog.get_logger(service_name)

    def log_backend_call(self, backend: str, target: str, status: Optional[int] = None,
                         response_time: Optional[float] = None, error: Optional[str] = None):
        """Log a call to an external transcription backend."""
        log_data = {
            "backend": backend,
            "target": target,
        }

        if status is not None:
            log_data["status"] = status

        if response_time is not None:
            log_data["response_time_ms"] = round(response_time * 1000, 2)

        if error:
            log_data["error"] = error
            self.logger.error("Backend call failed", **log_data)
        else:
            self.logger.debug("Backend call completed", **log_data)

    def log_row_result(self, row_id: str, success: bool, error: Optional[str] = None, **fields):
        """Log the outcome of one evaluated manifest row."""
        log_data = {"row_id": row_id, "success": success, **fields}

        if error:
            log_data["error"] = error
            self.logger.warning("Row failed", **log_data)
        else:
            self.logger.debug("Row evaluated", **log_data)
