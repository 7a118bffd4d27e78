"""
Centralized logging configuration for the application.
"""
import logging
import os
import sys

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def resolve_level(level: int | str | None = None) -> int:
    """Turn a level name (or None, meaning $LOG_LEVEL) into a logging level."""
    if level is None:
        level = os.environ.get("LOG_LEVEL", "INFO")
    if isinstance(level, int):
        return level
    value = logging.getLevelName(level.upper())
    return value if isinstance(value, int) else logging.INFO


def setup_logging(level: int | str | None = None) -> None:
    """
    Configure logging for the entire application.

    Records go to stderr: stdout carries the wire protocol when the
    evaluation service runs over stdio.

    Args:
        level: The logging level (default: $LOG_LEVEL, else INFO)
    """
    logging.basicConfig(
        level=resolve_level(level),
        format=LOG_FORMAT,
        handlers=[
            logging.StreamHandler(sys.stderr)
        ],
        force=True,
    )


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger instance for a module.

    Args:
        name: The name of the module (typically __name__)

    Returns:
        Configured logger instance
    """
    return logging.getLogger(name)
