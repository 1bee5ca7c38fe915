from fractions import Fraction

import mpmath
import pytest


@pytest.fixture
def oracle():
    """High-precision mpmath context used as the independent reference."""
    with mpmath.workprec(1024):
        yield mpmath.mp


def to_mpf(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


def encloses(interval, value) -> bool:
    """Does the VerifiedReal ``interval`` contain the mpmath number ``value``?"""
    return to_mpf(interval.lo) <= value <= to_mpf(interval.hi)


# acceptance verdicts, echoed in the terminal summary so they show without -s
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
