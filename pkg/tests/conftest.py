import sys

import pytest

from orbitfix.finite_space import build_finite_space


@pytest.fixture
def path3():
    return build_finite_space(None, [[0, 1, 2], [1, 0, 1], [2, 1, 0]])


@pytest.fixture
def equilateral3():
    return build_finite_space(["a", "b", "c"], [[0, 1, 1], [1, 0, 1], [1, 1, 0]])


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[key])
