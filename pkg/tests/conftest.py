import numpy as np
import pytest

from footfall.transition import train

# edge multiplicities of the six-activity event graph, 1-based labels
EVENT_EDGES = {
    (1, 2): 27, (2, 3): 23, (3, 4): 15, (4, 5): 21, (5, 6): 11,
    (6, 1): 9, (1, 4): 13, (3, 6): 5, (5, 2): 8,
}

EVENT_W = np.array([
    [0, 27, 0, 13, 0, 0],
    [0, 0, 23, 0, 0, 0],
    [0, 0, 0, 15, 0, 5],
    [0, 0, 0, 0, 21, 0],
    [0, 8, 0, 0, 0, 11],
    [9, 0, 0, 0, 0, 0],
])


def event_patterns():
    """One two-visit pattern per observed transition."""
    return [[a - 1, b - 1] for (a, b), m in EVENT_EDGES.items() for _ in range(m)]


@pytest.fixture
def event_corpus():
    return event_patterns()


@pytest.fixture
def event_model():
    return train(event_patterns(), n=6)


_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one summary line per acceptance criterion."""

    def _report(name, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] {name}" + (f": {detail}" if detail else "")
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
