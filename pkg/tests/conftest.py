import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


class ShadowCost:
    """Wraps a cost and counts raw invocations of its body."""

    def __init__(self, cost):
        self.cost = cost
        self.n = cost.n
        self.calls = 0
        self.seen = set()

    def __call__(self, subset):
        self.calls += 1
        self.seen.add(subset)
        return self.cost(subset)


@pytest.fixture
def shadow():
    return ShadowCost


ACCEPTANCE_LINES: list = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for the acceptance summary, then assert."""

    def record(number, title, ok, detail):
        ACCEPTANCE_LINES.append((number, f"criterion {number}: {'PASS' if ok else 'FAIL'} - {title} ({detail})"))
        assert ok, detail

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
