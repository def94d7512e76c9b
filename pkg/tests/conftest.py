from fractions import Fraction

import pytest
from hypothesis import settings

from pamdp.lattice import PseudoAntichain

settings.register_profile("default", deadline=None, max_examples=150)
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def sem(A):
    """Brute-force set denoted by a pseudo-antichain."""
    return frozenset(A.states())


def pa(d, pes):
    return PseudoAntichain(d, [(x, tuple(alpha)) for x, alpha in pes])


def F(x):
    return Fraction(x)


@pytest.fixture
def frac():
    return Fraction
