from __future__ import annotations

import json
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

# verdict flags per segment (C1..C4) for the convert_to_idn example
TABLE5_FLAGS = [[1, 1, 1, 1], [0, 1, 0, 1], [1, 1, 1, 1], [1, 0, 0, 1], [1, 1, 1, 0]]
TABLE13_FLAGS = [[1, 1, 1, 1], [0, 0, 0, 0], [1, 1, 1, 1], [0, 0, 0, 0], [1, 1, 1, 0]]


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


@pytest.fixture
def idn_summary() -> str:
    return (FIXTURES / "idn" / "summary.txt").read_text(encoding="utf-8")


def load_json(path: Path):
    return json.loads(path.read_text(encoding="utf-8"))


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: str, ok: bool, title: str, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: (int(l.split()[2].rstrip(":ab")), l)):
            terminalreporter.write_line(line)
