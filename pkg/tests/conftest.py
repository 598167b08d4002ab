from __future__ import annotations

import pytest

#: (criterion, passed, message) lines collected by the acceptance tests
ACCEPTANCE_LINES: list[tuple[int, bool, str]] = []


@pytest.fixture
def record_criterion():
    def record(number: int, passed: bool, message: str) -> None:
        line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {message}"
        print(line)
        ACCEPTANCE_LINES.append((number, passed, line))

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
