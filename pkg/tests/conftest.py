import math

import pytest

from qdshuttle.core import SystemParams

# acceptance lines collected by test_acceptance.report and echoed after the run
ACCEPTANCE_LINES = []


@pytest.fixture
def params10():
    return SystemParams(10.0)


@pytest.fixture
def display():
    return SystemParams(20 / math.pi)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
