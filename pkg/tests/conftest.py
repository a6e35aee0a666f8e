import sys
from pathlib import Path

from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

# numba compiles on first use, so per-example deadlines are meaningless
settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

import pytest

_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def report():
    """Record one acceptance line; the test itself still asserts."""

    def _report(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE[number] = line
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[k])
