import pytest
from hypothesis import HealthCheck, settings

from frontgate.reaction import WolbachiaParams, make_cubic, make_wolbachia_f

settings.register_profile("frontgate", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("frontgate")


@pytest.fixture(scope="session")
def cubic():
    return make_cubic(0.25)


@pytest.fixture(scope="session")
def wolb():
    return make_wolbachia_f(WolbachiaParams())


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
