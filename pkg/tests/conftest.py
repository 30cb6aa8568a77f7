import mpmath
import pytest

from altlattice.numerics import PrecisionContext


@pytest.fixture
def ctx50():
    return PrecisionContext(50)


def agree(a, b, places):
    """|a - b| < 10**-places, compared at enough precision to resolve it."""
    with mpmath.workdps(places + 20):
        return abs(mpmath.mpf(a) - mpmath.mpf(b)) < mpmath.mpf(10) ** (-places)


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line for an acceptance criterion."""

    def record(number, passed, detail):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
