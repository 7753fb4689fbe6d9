import math

import pytest

from proptime.clock import ClockSpec

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def unit_clock():
    return ClockSpec.constant(1.0)


@pytest.fixture
def period():
    return math.pi


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
