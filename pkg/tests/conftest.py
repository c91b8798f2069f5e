from fractions import Fraction

import pytest

from chromatic_alpha.geometry import ChromaticPointSet


def F(x):
    return Fraction(x)


@pytest.fixture
def line_bichromatic():
    """A_0 = {0, 2}, A_1 = {1} on the real line."""
    return ChromaticPointSet(((F(0),), (F(1),), (F(2),)), (0, 1, 0), 2)


@pytest.fixture
def equilateral():
    """One-colored equilateral triangle of side 2 (exact up to 1e-12 via a rational height)."""
    from chromatic_alpha.generators import HEX_Q

    return ChromaticPointSet(((F(0), F(0)), (F(2), F(0)), (F(1), 2 * HEX_Q)), (0, 0, 0), 1)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance") or sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
