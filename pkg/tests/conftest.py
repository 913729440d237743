import json
import random
from pathlib import Path

import pytest
from hypothesis import strategies as st

from dtomo.lattice import Grid2, Grid3, normalize_direction

FIXTURES = Path(__file__).parent / "fixtures"
EXAMPLE_DIRS = [(1, 1, 2), (1, -2, 1), (1, 1, -2), (1, 0, 0)]


@pytest.fixture(scope="session")
def expected():
    return json.loads((FIXTURES / "example_expected.json").read_text())


@pytest.fixture(scope="session")
def example_grid():
    return Grid3(5, 5, 6)


@pytest.fixture(scope="session")
def example_dirs():
    return [normalize_direction(d) for d in EXAMPLE_DIRS]


def random_dirs(rng: random.Random, dim: int, count: int, bound: int = 3) -> list:
    out = set()
    while len(out) < count:
        v = [rng.randint(-bound, bound) for _ in range(dim)]
        if any(v):
            out.add(normalize_direction(v))
    return sorted(out)


def random_values(rng: random.Random, size: int, rational: bool = False) -> list:
    from fractions import Fraction

    if rational:
        return [Fraction(rng.randint(-20, 20), rng.randint(1, 4)) for _ in range(size)]
    return [rng.randint(-9, 9) for _ in range(size)]


@st.composite
def instances(draw, dim=None, max_dirs=4, max_side=7, bound=3):
    dim = dim or draw(st.sampled_from([2, 3]))
    ext = [draw(st.integers(1, max_side)) for _ in range(dim)]
    grid = Grid3(*ext) if dim == 3 else Grid2(*ext)
    comps = st.lists(st.integers(-bound, bound), min_size=dim, max_size=dim).filter(any)
    raw = draw(st.lists(comps, min_size=1, max_size=max_dirs))
    dirs = sorted({normalize_direction(v) for v in raw})
    values = draw(st.lists(st.integers(-9, 9), min_size=grid.size, max_size=grid.size))
    return grid, dirs, values


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
