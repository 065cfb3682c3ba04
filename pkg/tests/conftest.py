import pytest

from schedrand.taskmodel import Taskset

from oracles import EX1, EX2, EX3


@pytest.fixture
def ex1():
    return Taskset.from_params(EX1)


@pytest.fixture
def ex2():
    return Taskset.from_params(EX2)


@pytest.fixture
def ex3():
    return Taskset.from_params(EX3)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
