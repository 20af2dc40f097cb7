import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))
FIXTURES = HERE.parent / "fixtures"

from surface_markov.partition import build_partition  # noqa: E402
from surface_markov.presentation import load_presentation  # noqa: E402

GEOMETRIC = [
    "genus2",
    "genus2_alt",
    "genus3",
    "genus2_odd",
    "genus2_mixed",
    "genus2_mixed3",
    "genus2_triangle",
    "nonorientable4_odd",
    "nonorientable4_xxy",
]
XXY_FREE = [f for f in GEOMETRIC if f != "nonorientable4_xxy"]


def fixture_text(name: str) -> str:
    return (FIXTURES / f"{name}.pres").read_text()


_cache: dict = {}


def load(name: str):
    if ("G", name) not in _cache:
        _cache[("G", name)] = load_presentation(fixture_text(name))
    return _cache[("G", name)]


def partition(name: str):
    if ("P", name) not in _cache:
        _cache[("P", name)] = build_partition(load(name))
    return _cache[("P", name)]


@pytest.fixture(scope="session")
def g2():
    return load("genus2")


@pytest.fixture(scope="session")
def part2():
    return partition("genus2")


# one line per acceptance criterion, echoed after the run
VERDICTS: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(VERDICTS):
            terminalreporter.write_line(VERDICTS[n])
