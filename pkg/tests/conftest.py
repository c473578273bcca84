import pytest

from vqlm.s2grid import build_grid


@pytest.fixture(scope="session")
def grid():
    return build_grid(128)


@pytest.fixture(scope="session")
def grid64():
    return build_grid(64)


_ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(number, passed, summary)``."""
    def record(number, passed, summary):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {summary}"
        _ACCEPTANCE[number] = line
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[number])
