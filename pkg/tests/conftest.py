"""Shared fixtures, plus the printed acceptance scoreboard.

Acceptance tests call ``acceptance.check(...)`` which records one line per
criterion; the lines are replayed in a terminal section after the run so
the pass/fail verdicts are visible even under plain ``pytest``.
"""

import pytest


class AcceptanceLog:
    def __init__(self) -> None:
        self.lines: list[str] = []

    def check(self, criterion: int, passed: bool, detail: str = "") -> None:
        """Record the verdict for one criterion, then assert it."""
        status = "PASS" if passed else "FAIL"
        line = f"criterion {criterion:>2}: {status}"
        if detail:
            line += f"  ({detail})"
        self.lines.append(line)
        print(line)
        assert passed, f"acceptance criterion {criterion} failed: {detail}"


_LOG = AcceptanceLog()


@pytest.fixture(scope="session")
def acceptance() -> AcceptanceLog:
    return _LOG


def pytest_terminal_summary(terminalreporter, exitstatus, config) -> None:
    if _LOG.lines:
        terminalreporter.section("acceptance criteria")
        for line in _LOG.lines:
            terminalreporter.write_line(line)
