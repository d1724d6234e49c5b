from __future__ import annotations

import pytest

VERDICTS: dict[int, tuple[str, str]] = {}


@pytest.fixture
def verdict():
    """Record a PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(number: int, ok: bool, detail: str) -> None:
        VERDICTS[number] = ("PASS" if ok else "FAIL", detail)
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, detail

    return record


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(VERDICTS):
        tag, detail = VERDICTS[number]
        terminalreporter.write_line(f"{tag} criterion {number:2d}: {detail}")
