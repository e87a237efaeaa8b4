import pytest
from hypothesis import HealthCheck, settings

from spikesim import InputCurrent, ModelSpec, SimState

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def burst_model():
    return ModelSpec.izhikevich()


@pytest.fixture
def burst_current():
    return InputCurrent.constant(7.6)


@pytest.fixture
def burst_init():
    return SimState(0.0, -59.9, 0.19 * -59.9)


@pytest.fixture
def cq_unit():
    # canonical quadratic with a = b = 1, used by the hand-computed examples
    return ModelSpec("canonical-quadratic", (), a=1.0, b=1.0, c=-1.0, d=0.5)


@pytest.fixture
def zero_current():
    return InputCurrent.constant(0.0)


def pytest_terminal_summary(terminalreporter):
    import sys

    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance.RESULTS:
        terminalreporter.write_line(line)
