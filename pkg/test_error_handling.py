"""
Error Handling Tests
Error codes, payload fields and exit statuses produced at the CLI boundary.
"""

import logging

import pytest

from operators import DENSE_ENTRY_LIMIT, build_J, make_grid
from utils.errors import (
    ConfigGuardError,
    ErrorReporter,
    InvalidArgumentError,
    LabError,
    LockError,
    OperatorSizeError,
    OutputError,
    RangeError,
)


@pytest.mark.parametrize("exc,code,extra", [
    (InvalidArgumentError("bad"), "invalid_argument", {}),
    (RangeError("index 9 out of range", index=9), "range_error", {"index": 9}),
    (OperatorSizeError("J is too large", 10, 5, "use lanczos_topk"), "size_limit",
     {"entries": 10, "limit": 5, "suggestion": "use lanczos_topk"}),
    (ConfigGuardError("j_max", "j_max=1 exceeds"), "config_guard", {"guard": "j_max"}),
    (OutputError("/tmp/x.csv", "disk full"), "io_error", {"path": "/tmp/x.csv"}),
    (LockError("/tmp/.speclab.lock"), "locked", {"path": "/tmp/.speclab.lock"}),
])
def test_payload_fields(exc, code, extra):
    payload = ErrorReporter({}).to_payload(exc)
    assert payload["success"] is False
    assert payload["type"] == code
    assert payload["error"] == str(exc)
    for key, value in extra.items():
        assert payload[key] == value


def test_hierarchy():
    assert issubclass(RangeError, InvalidArgumentError)
    assert issubclass(InvalidArgumentError, ValueError)
    assert issubclass(OutputError, OSError)
    assert all(issubclass(cls, LabError) for cls in (OperatorSizeError, ConfigGuardError, LockError))


def test_messages():
    assert "(10 entries > limit 5); use lanczos_topk" in str(OperatorSizeError("J", 10, 5, "use lanczos_topk"))
    assert str(ConfigGuardError("grid_points", "N=5000")).startswith("guard 'grid_points' violated")


def test_unexpected_exception_payload():
    payload = ErrorReporter({}).to_payload(ZeroDivisionError("division by zero"))
    assert payload == {"success": False, "type": "internal_error", "error": "ZeroDivisionError: division by zero"}


@pytest.mark.parametrize("exc,status", [
    (InvalidArgumentError("bad"), 2),
    (LockError("x"), 2),
    (RuntimeError("boom"), 1),
    (KeyboardInterrupt(), 130),
])
def test_exit_status(exc, status):
    assert ErrorReporter.exit_status(exc) == status


def test_detailed_logging_includes_traceback(caplog):
    try:
        raise InvalidArgumentError("bad grid")
    except InvalidArgumentError as e:
        exc = e
    with caplog.at_level(logging.ERROR):
        ErrorReporter({"log_detailed_errors": True}).to_payload(exc)
    assert "Traceback" in caplog.text

    caplog.clear()
    with caplog.at_level(logging.ERROR):
        ErrorReporter({"log_detailed_errors": False}).to_payload(exc)
    assert "Traceback" not in caplog.text
    assert "Command failed: bad grid" in caplog.text


def test_oversized_operator_reports_the_fallback():
    with pytest.raises(OperatorSizeError) as excinfo:
        build_J(make_grid(5000), make_grid(5000)).to_dense()
    assert "lanczos_topk" in excinfo.value.suggestion
    assert ErrorReporter({}).to_payload(excinfo.value)["limit"] == DENSE_ENTRY_LIMIT
