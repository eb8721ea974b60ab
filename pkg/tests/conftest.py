from fractions import Fraction

import pytest

from snntwin.profiles import builtin_profiles

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def presets():
    return builtin_profiles()


@pytest.fixture(scope="session")
def typical(presets):
    return presets["typical-neuromorphic"]


@pytest.fixture
def acceptance(capsys):
    """Record and print one PASS/FAIL line for an acceptance criterion."""

    def report(tag, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} [{tag}] {detail}"
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def ref_simulate(weights, theta, rows):
    """Straight Fraction-arithmetic IF reference; no integer rescaling."""
    theta = Fraction(theta)
    v = Fraction(0)
    pots, out = [], []
    for t in range(len(rows[0])):
        v += sum((Fraction(w) * r[t] for w, r in zip(weights, rows)), Fraction(0))
        if v >= theta:
            v -= theta
            out.append(1)
        else:
            out.append(0)
        pots.append(v)
    return pots, out
