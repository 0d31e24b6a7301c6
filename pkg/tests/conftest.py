import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

ROOT = Path(__file__).resolve().parents[1]
MINI = ROOT / "corpus" / "mini"

ACCEPTANCE_RESULTS = {}


@pytest.fixture
def mini():
    return MINI


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        status, title = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"[{status}] criterion {number}: {title}")
