"""
Error Types and Reporting
Exception hierarchy shared by every package plus the reporter that turns
exceptions into machine-readable payloads at the CLI boundary.
"""

from typing import Dict, Any, Optional
import logging
import traceback

logger = logging.getLogger(__name__)


class LabError(Exception):
    """Base class for every error raised deliberately by the lab."""

    code = "lab_error"

    def details(self) -> Dict[str, Any]:
        """Extra machine-readable fields for the error payload."""
        return {}


class InvalidArgumentError(LabError, ValueError):
    """An operation was called outside its preconditions."""

    code = "invalid_argument"


class RangeError(InvalidArgumentError):
    """A value inside an index range violates a precondition."""

    code = "range_error"

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index

    def details(self) -> Dict[str, Any]:
        return {"index": self.index}


class OperatorSizeError(LabError):
    """Dense storage would exceed the configured entry limit."""

    code = "size_limit"

    def __init__(self, message: str, entries: int, limit: int, suggestion: str):
        super().__init__(f"{message} ({entries} entries > limit {limit}); {suggestion}")
        self.entries = entries
        self.limit = limit
        self.suggestion = suggestion

    def details(self) -> Dict[str, Any]:
        return {"entries": self.entries, "limit": self.limit, "suggestion": self.suggestion}


class ConfigGuardError(LabError):
    """An experiment configuration violates a desk-scale guard."""

    code = "config_guard"

    def __init__(self, guard: str, message: str):
        super().__init__(f"guard '{guard}' violated: {message}")
        self.guard = guard

    def details(self) -> Dict[str, Any]:
        return {"guard": self.guard}


class OutputError(LabError, OSError):
    """Reading or writing a result file failed."""

    code = "io_error"

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = str(path)

    def details(self) -> Dict[str, Any]:
        return {"path": self.path}


class LockError(LabError):
    """Another run holds the output directory."""

    code = "locked"

    def __init__(self, path: str):
        super().__init__(f"output directory is locked by another run: {path}")
        self.path = str(path)

    def details(self) -> Dict[str, Any]:
        return {"path": self.path}


class ErrorReporter:
    """Builds error payloads for the CLI and logs details server side."""

    def __init__(self, config: Dict[str, Any]):
        """
        Initialize reporter with the loaded configuration.

        Args:
            config: Flat configuration mapping (see config.yaml)
        """
        self.log_detailed = bool(config.get("log_detailed_errors", True))

    def to_payload(self, exc: BaseException) -> Dict[str, Any]:
        """
        Convert an exception into a machine-readable payload.

        Args:
            exc: The exception that ended the command

        Returns:
            Dict with 'success', 'type', 'error' and error-specific keys
        """
        if isinstance(exc, LabError):
            payload = {"success": False, "type": exc.code, "error": str(exc)}
            payload.update(exc.details())
        else:
            payload = {"success": False, "type": "internal_error", "error": f"{type(exc).__name__}: {exc}"}

        if self.log_detailed:
            logger.error("".join(traceback.format_exception(type(exc), exc, exc.__traceback__)).rstrip())
        else:
            logger.error(f"Command failed: {payload['error']}")

        return payload

    @staticmethod
    def exit_status(exc: BaseException) -> int:
        """Process exit status for an exception."""
        if isinstance(exc, KeyboardInterrupt):
            return 130
        if isinstance(exc, LabError):
            return 2
        return 1
