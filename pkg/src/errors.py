"""
Exception hierarchy shared by every package.

ConfigError maps to CLI exit code 2, SolverError and SourceError to exit code 3.
"""


class BenchError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 3
    code = "runtime"


class ConfigError(BenchError, ValueError):
    """Invalid input, manifest or configuration."""

    exit_code = 2
    code = "config"


class DimensionError(ConfigError):
    code = "dimension"

    def __init__(self, message: str, expected: int | None = None):
        super().__init__(message)
        self.expected = expected


class ParseError(ConfigError):
    code = "parse"

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class ShapeMismatchError(ConfigError):
    code = "shape"


class UnknownNameError(ConfigError):
    code = "unknown"


class SolverError(BenchError, RuntimeError):
    """Numerical failure inside a solve (non-finite values, ill-conditioning)."""

    code = "solver"


class SourceError(BenchError, OSError):
    """A dataset source could not be read or fetched."""

    code = "source"
