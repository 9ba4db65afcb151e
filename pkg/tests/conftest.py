import pytest

from tadroute.model import parse_time
from tadroute.netgen import paper_fixture


def hm(text):
    return parse_time(text)


@pytest.fixture
def motivating():
    return paper_fixture("motivating")


@pytest.fixture
def pruning_net():
    return paper_fixture("pruning")


@pytest.fixture
def nonfifo():
    return paper_fixture("nonfifo_intro")


# one line per acceptance criterion, echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number, ok: bool | None, text: str) -> None:
    status = "SKIP" if ok is None else "PASS" if ok else "FAIL"
    ACCEPTANCE_LINES.append(f"[{status}] criterion {number}: {text}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
