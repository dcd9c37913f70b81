from fractions import Fraction

import pytest

from markovbits.markov import ChainModel

# Three-state matrix used for the exact output-distribution table.  Rows are
# published rounded to six digits and sum to 1 only within 2e-6.
TABLE_MATRIX = (
    ("0.300987", "0.468876", "0.230135"),
    ("0.462996", "0.480767", "0.056236"),
    ("0.42424", "0.032404", "0.543355"),
)


def s(text):
    """1-based state string ``"1421"`` -> 0-based symbols ``[0, 3, 1, 0]``."""
    return [int(c) - 1 for c in text.replace(" ", "")]


def two_state(p1, p2, start=0):
    """P[s2|s1] = p1, P[s1|s2] = p2."""
    p1, p2 = Fraction(p1), Fraction(p2)
    return ChainModel(((1 - p1, p1), (p2, 1 - p2)), start=start)


@pytest.fixture
def table_model():
    return ChainModel(TABLE_MATRIX, start=0, tolerance=1e-5)


_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
