import numpy as np
import pytest

from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def acceptance_report():
    """Record a one-line PASS/FAIL verdict for an acceptance criterion."""

    def record(number: int, title: str, ok: bool, detail: str = "") -> None:
        line = f"[criterion {number:2d}] {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
