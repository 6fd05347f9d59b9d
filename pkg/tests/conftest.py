import numpy as np
import pytest

from schoolsim.core import SimParams, SwarmState


@pytest.fixture
def params():
    return SimParams(n_prey=5, t_max=50, t_max_school=50)


@pytest.fixture
def five_prey():
    x = np.array([[0.0, 0.0], [1.2, 0.1], [-0.4, 0.9], [0.5, -1.1], [-1.3, -0.2]])
    v = np.array([[0.1, 0.0], [0.0, 0.05], [-0.02, 0.03], [0.04, -0.01], [0.0, 0.0]])
    return SwarmState(x, v)


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_report():
    """Record one pass/fail line per acceptance criterion; printed in the summary."""

    def record(number: int, title: str, passed: bool, detail: str):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {title} -- {detail}"
        _ACCEPTANCE_LINES.append((number, line))
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
