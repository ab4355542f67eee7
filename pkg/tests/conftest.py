from __future__ import annotations

import pytest

from edf_exact.fixtures import CE1, CE2
from edf_exact.model import TaskSystem


@pytest.fixture
def ce1() -> TaskSystem:
    return CE1


@pytest.fixture
def ce2() -> TaskSystem:
    return CE2


@pytest.fixture
def overloaded_uni() -> TaskSystem:
    """Two (0,3,4,4) tasks on one CPU: demand 6 per window of 4."""
    return TaskSystem([(0, 3, 4, 4), (0, 3, 4, 4)], 1)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion(request):
    """Record a PASS/FAIL line for an acceptance criterion."""
    label = request.node.function.__doc__.strip().splitlines()[0]
    notes: list[str] = []
    yield notes
    rep = getattr(request.node, "rep_call", None)
    status = "PASS" if rep is not None and rep.passed else "FAIL"
    line = f"[{status}] {label}" + (f" ({'; '.join(notes)})" if notes else "")
    ACCEPTANCE_LINES.append(line)
    print(line)


@pytest.hookimpl(wrapper=True, tryfirst=True)
def pytest_runtest_makereport(item, call):
    rep = yield
    if rep.when == "call":
        item.rep_call = rep
    return rep


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
