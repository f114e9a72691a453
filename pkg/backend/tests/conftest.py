# backend/tests/conftest.py
import pytest

from hypothesis import settings as hypothesis_settings, HealthCheck

from workbench.marked_groups import cyclic_group, symmetric_group
from workbench.shared import error_handler, metrics

hypothesis_settings.register_profile(
    "workbench",
    max_examples=50,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
hypothesis_settings.load_profile("workbench")


@pytest.fixture(autouse=True)
def clean_state():
    metrics.reset()
    error_handler.clear()
    yield


@pytest.fixture
def z4():
    return cyclic_group(4)


@pytest.fixture
def s3():
    return symmetric_group(3)
