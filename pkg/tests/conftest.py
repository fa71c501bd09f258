import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

SUITE_BUDGET_S = 600.0
_START = time.perf_counter()
_LINES: dict[int, str] = {}


class Recorder:
    """Collects one verdict line per acceptance criterion for the terminal summary."""

    def __call__(self, number: int, passed: bool, detail: str) -> None:
        _LINES[number] = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        print(_LINES[number])


@pytest.fixture(scope="session")
def record() -> Recorder:
    return Recorder()


@pytest.fixture(scope="session")
def tgrid():
    from carleman_lab.spectral import TGrid

    return TGrid()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _LINES:
        return
    elapsed = time.perf_counter() - _START
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(_LINES):
        tr.write_line(_LINES[k])
    ok = elapsed < SUITE_BUDGET_S
    tr.write_line(f"suite wall time {elapsed:.1f} s (budget {SUITE_BUDGET_S:.0f} s): {'PASS' if ok else 'FAIL'}")


def pytest_sessionfinish(session, exitstatus):
    if _LINES and time.perf_counter() - _START > SUITE_BUDGET_S and exitstatus == 0:
        session.exitstatus = 1
