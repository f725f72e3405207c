from pathlib import Path

import pytest
from hypothesis import settings

from uchoo.engine import load
from uchoo.parser import parse_program

settings.register_profile("default", deadline=None)
settings.load_profile("default")

PROGRAMS = Path(__file__).resolve().parents[1] / "src" / "uchoo" / "programs"
BUNDLED = ("templeU", "smartphone", "switch")

GOLDEN = Path(__file__).resolve().parent / "golden"
# fixture name -> (read() inputs, max steps); smartphone loops forever
GOLDEN_RUNS = {
    "templeU": (["medical"], 10_000),
    "switch": ([], 10_000),
    "smartphone": ([], 200),
}

ACCEPTANCE_LINES: list[str] = []


def bundled_source(name: str) -> str:
    return (PROGRAMS / f"{name}.uch").read_text(encoding="utf-8")


@pytest.fixture
def source():
    def get(name):
        return parse_program(bundled_source(name))

    return get


@pytest.fixture
def program(source):
    def get(name):
        return load(source(name))

    return get


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
