import sys

import pytest

from toricbound import compute_bounds, validate_rep


@pytest.fixture(scope="session")
def rep1():
    return validate_rep(1, [(1,), (-1,)], ["x", "y"])


@pytest.fixture(scope="session")
def rep2():
    return validate_rep(2, [(1, 0), (-1, 0), (0, 1), (0, -1)])


@pytest.fixture(scope="session")
def bounds1(rep1):
    return compute_bounds(rep1)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
