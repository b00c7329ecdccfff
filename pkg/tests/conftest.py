import json
from pathlib import Path

import pytest
from hypothesis import settings

DATA = Path(__file__).with_name("data")


@pytest.fixture(scope="session")
def oracle():
    """Reference values frozen by ``derive_oracles.py``."""
    return json.loads((DATA / "oracles.json").read_text())


# numba compiles lazily, so the first example of a test can be slow
settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture()
def verdict():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
