from __future__ import annotations

from importlib import resources
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


def data_text(name: str) -> str:
    return resources.files("scansion").joinpath("data", name).read_text(encoding="utf-8")


@pytest.fixture
def ozymandias_text() -> str:
    return (FIXTURES / "ozymandias.tsv").read_text(encoding="utf-8")


@pytest.fixture
def sample_text() -> str:
    return data_text("sample.tsv")


# acceptance criteria report one line each; the lines are repeated in the
# terminal summary so they survive output capturing
ACCEPTANCE_LINES: list[str] = []


def report_criterion(number: int, title: str, passed: bool | None, detail: str) -> None:
    """``passed=None`` marks a criterion that could not run here."""
    status = "SKIP" if passed is None else "PASS" if passed else "FAIL"
    line = f"criterion {number:2d} {status}  {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
