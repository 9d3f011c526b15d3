"""Utility functions for Spectral Lab."""

from .console import (
    ColorFormatter,
    highlight,
    setup_logging
)

from .errors import (
    ConfigGuardError,
    ErrorReporter,
    InvalidArgumentError,
    LabError,
    LockError,
    OperatorSizeError,
    OutputError,
    RangeError
)

from .formatting import (
    dumps,
    format_result_summary,
    format_table,
    to_jsonable
)

__all__ = [
    "ColorFormatter",
    "highlight",
    "setup_logging",
    "ConfigGuardError",
    "ErrorReporter",
    "InvalidArgumentError",
    "LabError",
    "LockError",
    "OperatorSizeError",
    "OutputError",
    "RangeError",
    "dumps",
    "format_result_summary",
    "format_table",
    "to_jsonable"
]
