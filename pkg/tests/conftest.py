import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from motiongate.trace import TraceGenConfig, generate_session_trace  # noqa: E402


@pytest.fixture(scope="session")
def minute_trace():
    return generate_session_trace(TraceGenConfig(session_s=60, seed=7))


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion(request):
    """Record a one-line PASS/FAIL verdict for an acceptance criterion."""

    def report(number: int, title: str, passed: bool, detail: str = "") -> None:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {title}"
        if detail:
            line += f"  ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert passed, line

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
