# backend/tests/test_shared.py
import pytest

from workbench.shared import error_handler, metrics
from workbench.shared.config import DEFAULT_SETTINGS, load_settings, resolve_cap
from workbench.shared.error_handler import (
    DomainError,
    FormatError,
    NotInvertible,
    PropertyViolation,
    ResourceCapExceeded,
    StageFailure,
)


def test_defaults():
    settings = load_settings({})
    assert settings.ball_cap == DEFAULT_SETTINGS["ball_cap"]
    assert settings.port == 8000


def test_environment_overrides():
    settings = load_settings({"WORKBENCH_RESOURCE_CAP": "500", "WORKBENCH_LOG_LEVEL": "debug", "WORKBENCH_PORT": " "})
    assert settings.ball_cap == 500
    assert settings.log_level == "debug"
    assert settings.port == 8000
    assert load_settings({"WORKBENCH_GROUP_ORDER_CAP": "120"}).group_order_cap == 120


def test_bad_override_is_rejected():
    with pytest.raises(ValueError):
        load_settings({"WORKBENCH_PATTERN_CAP": "lots"})


def test_resolve_cap():
    assert resolve_cap(7, "ball_cap") == 7
    assert resolve_cap(None, "max_prime") == DEFAULT_SETTINGS["max_prime"]


@pytest.mark.parametrize("error, code", [
    (FormatError("bad line"), 2),
    (ValueError("bad literal"), 2),
    (DomainError("outside"), 1),
    (NotInvertible("singular"), 1),
    (StageFailure("fix-agreement", "shrinking"), 1),
    (PropertyViolation("broken"), 1),
    (ResourceCapExceeded("ball", 10, 5), 3),
    (RuntimeError("unexpected"), 1),
])
def test_exit_codes(error, code):
    assert error_handler.exit_code_for(error) == code


def test_record_and_stats():
    error_handler.record("runner.fix-window", ResourceCapExceeded("ball", 10, 5))
    error_handler.record("runner.fix-window", FormatError("bad"))
    stats = error_handler.get_error_stats()
    assert stats["total_errors"] == 2
    assert stats["by_exit_code"] == {3: 1, 2: 1}
    assert stats["recent_errors"][0]["severity"] in ("high", "low")
    assert "traceback" not in stats["recent_errors"][0]


def test_history_limit():
    for i in range(error_handler.history_limit + 5):
        error_handler.record("loop", DomainError(str(i)))
    assert error_handler.get_error_stats()["total_errors"] == error_handler.history_limit


def test_timed_records_even_on_failure():
    with pytest.raises(DomainError):
        with metrics.timed("lab.step", command="x"):
            raise DomainError("stop")
    metrics.increment_counter("lab.calls", 2)
    summary = metrics.get_metrics_summary()
    assert summary["events"]["lab.step,command=x"]["count"] == 1
    assert summary["counters"]["lab.calls"] == 2
