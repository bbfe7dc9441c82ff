import math

import numpy as np
import pytest

from duality.combinatorics import ModeOccupation
from duality.states import InternalState, PreparedState


@pytest.fixture
def example_state():
    """Three bosons in occupation (2, 1) with correlated internal state (aaa + abb + bab)/sqrt(3)."""
    c = 1 / math.sqrt(3)
    internal = InternalState.pure({(0, 0, 0): c, (0, 1, 1): c, (1, 0, 1): c}, m=2)
    return PreparedState(ModeOccupation((2, 1)), "boson", internal)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance PASS/FAIL lines, which stdout capture would otherwise hide."""
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
