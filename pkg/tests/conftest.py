from __future__ import annotations

import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record():
    """Print and keep one pass/fail line per acceptance criterion."""
    def _record(criterion: str, passed: bool, detail: str) -> None:
        line = f"{criterion} {'PASS' if passed else 'FAIL'}: {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
