"""Shared test plumbing: a session-wide log that collects one line per
acceptance check and prints them as a block after the test summary."""

import pytest


class CriterionLog:
    def __init__(self):
        self.lines: list[str] = []

    def record(self, line: str) -> None:
        self.lines.append(line)


_LOG = CriterionLog()


@pytest.fixture(scope="session")
def criterion_log() -> CriterionLog:
    return _LOG


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _LOG.lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in _LOG.lines:
        terminalreporter.write_line(line)
