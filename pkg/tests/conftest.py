import numpy as np
import pytest

from halfspace_thermal import ProblemSpec

_ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


@pytest.fixture
def step_insulator():
    return ProblemSpec(1.0, 0.0)


@pytest.fixture
def imperfect_insulator():
    return ProblemSpec(1.0, 1.0)


@pytest.fixture
def report():
    """Record one PASS/FAIL line for the acceptance summary."""

    def _record(number, name, passed, detail):
        _ACCEPTANCE_LINES.append((number, f"[{'PASS' if passed else 'FAIL'}] criterion {number} {name}: {detail}"))
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE_LINES, key=lambda item: item[0]):
        terminalreporter.write_line(line)
