from __future__ import annotations

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(Path(__file__).resolve().parent))

from bvrgame.attack import AttackScenario  # noqa: E402

SCENARIOS = ROOT / "scenarios"

# acceptance lines collected during the run and echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def section_v() -> AttackScenario:
    return AttackScenario((-6, 8), (15, 14), (16, 6.5), (15.5, 10), 1.25, 5.0, 7.0)


@pytest.fixture
def scenarios_dir() -> Path:
    return SCENARIOS


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
