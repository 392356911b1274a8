"""Shared test plumbing.

The acceptance tests register one line per criterion through the
``criterion_log`` fixture; the summary hook prints the collected
checklist after the usual pytest output so a test run always ends with
an explicit pass/fail line for every numbered criterion.
"""

import pytest

ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, passed: bool, detail: str) -> None:
    word = "PASS" if passed else "FAIL"
    ACCEPTANCE_LINES[number] = f"[{word}] criterion {number}: {detail}"


@pytest.fixture(scope="session")
def criterion_log():
    return record_criterion


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
