import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dtomo.lattice import (
    DegenerateDirectionError,
    Direction2,
    Grid2,
    Grid3,
    LineKey,
    enumerate_lines,
    forward_project,
    is_valid,
    line_index,
    line_points,
    normalize_direction,
    project_direction,
    to_value,
    validity,
)

from conftest import EXAMPLE_DIRS, instances


@pytest.mark.parametrize(
    "raw, want",
    [((-1, 2, -1), (1, -2, 1)), ((2, 2, 4), (1, 1, 2)), ((0, 0, -3), (0, 0, 1)), ((0, -2, 4), (0, 1, -2))],
)
def test_normalize_direction(raw, want):
    assert tuple(normalize_direction(raw)) == want


def test_normalize_2d_and_degenerate():
    assert normalize_direction((-4, 6)) == Direction2(2, -3, True)
    assert normalize_direction((0, -5)) == Direction2(0, 1, True)
    with pytest.raises(DegenerateDirectionError):
        normalize_direction((0, 0, 0))
    with pytest.raises(ValueError):
        normalize_direction((1, 2, 3, 4))


@given(st.lists(st.integers(-6, 6), min_size=3, max_size=3).filter(any))
def test_normalize_idempotent_and_same_line(raw):
    d = normalize_direction(raw)
    assert normalize_direction(d) == d
    a, b, c = d
    assert a > 0 or (a == 0 and (b > 0 or (b == 0 and c == 1)))
    # Same line through the origin: raw is an integer multiple of d.
    k = next(x // y for x, y in zip(raw, d) if y)
    assert tuple(k * x for x in d) == tuple(raw)


def test_project_direction():
    assert project_direction((1, 0, 0), "x").vector == (0, 0)
    assert project_direction((1, -2, 1), "x").vector == (-2, 1)
    assert project_direction((1, 1, -2), "y").vector == (1, -2)
    assert project_direction((1, 1, 2), "z").vector == (1, 1)
    assert not project_direction((2, 4, 1), "z").primitive
    xs = [project_direction(d, "x").vector for d in EXAMPLE_DIRS]
    assert xs == [(1, 2), (-2, 1), (1, -2), (0, 0)]
    ys = [project_direction(d, "y").vector for d in EXAMPLE_DIRS]
    assert ys == [(1, 2), (1, 1), (1, -2), (1, 0)]
    with pytest.raises(ValueError):
        project_direction((1, 0, 0), "w")


def _sizes(grid, d):
    return sorted(len(line_points(grid, d, k.base)) for k in enumerate_lines(grid, d))


def test_enumerate_lines_small():
    assert _sizes(Grid2(3, 1), (1, 0)) == [3]
    assert _sizes(Grid2(2, 2), (1, 1)) == [1, 1, 2]
    g = Grid3(2, 2, 2)
    assert len(enumerate_lines(g, (1, 1, 1))) == 7
    assert sum(_sizes(g, (1, 1, 1))) == 8


def _brute_partition(grid, vec):
    """Lines found by walking from every point; base = smallest flat index."""
    seen = {}
    for pt in grid.points():
        line = line_points(grid, vec, pt)
        base = min(line, key=grid.flat)
        seen.setdefault(base, set()).update(line)
    return seen


@settings(max_examples=60, deadline=None)
@given(instances(max_side=6))
def test_partition_matches_brute_force(inst):
    grid, dirs, _ = inst
    for d in dirs:
        brute = _brute_partition(grid, d)
        keys = enumerate_lines(grid, d)
        assert [k.base for k in keys] == sorted(brute, key=grid.flat)
        covered = []
        for k in keys:
            pts = line_points(grid, d, k.base)
            assert set(pts) == brute[k.base]
            assert min(pts, key=grid.flat) == k.base
            covered += pts
        assert sorted(covered, key=grid.flat) == list(grid.points())


def test_partition_10_cube():
    g = Grid3(10, 10, 10)
    for d in [(1, 2, -3), (0, 1, 1), (3, 0, -1)]:
        labels, bases = line_index(g, d)
        brute = _brute_partition(g, d)
        assert len(bases) == len(brute)
        for i, pt in enumerate(g.points()):
            assert g.point(int(bases[labels[i]])) in brute and pt in brute[g.point(int(bases[labels[i]]))]


def test_forward_project_examples():
    g = Grid3(2, 2, 2)
    t = forward_project(g, [0] * 8, [(1, 1, 1)])
    assert set(t.sums[0].values()) == {0}
    t = forward_project(g, [1] * 8, [(0, 0, 1)])
    assert len(t.sums[0]) == 4 and set(t.sums[0].values()) == {2}
    g = Grid3(5, 5, 6)
    t = forward_project(g, [1] * g.size, [(1, 0, 0)])
    assert len(t.sums[0]) == 30 and set(t.sums[0].values()) == {5}
    assert t[LineKey(0, (0, 3, 4))] == 5


def test_grand_total_identity():
    rng = random.Random(7)
    g = Grid3(4, 4, 4)
    f = [Fraction(rng.randint(-50, 50), rng.randint(1, 6)) for _ in range(g.size)]
    dirs = [normalize_direction(d) for d in [(1, 1, 2), (1, -2, 1), (0, 1, -1), (2, 1, 0)]]
    t = forward_project(g, f, dirs)
    for h in range(len(dirs)):
        assert t.total(h) == sum(f)


def test_forward_project_accepts_mapping_and_array():
    g = Grid3(3, 2, 2)
    flat = list(range(g.size))
    arr = np.zeros((3, 2, 2), dtype=int)
    for i, (p, q, r) in enumerate(g.points()):
        arr[p, q, r] = flat[i]
    mapping = dict(zip(g.points(), flat))
    dirs = [(1, 1, 0), (0, 1, 1)]
    ref = forward_project(g, flat, dirs)
    assert forward_project(g, arr, dirs) == ref
    assert forward_project(g, mapping, dirs) == ref


def test_values_are_exact():
    assert to_value(Fraction(6, 3)) == 2 and type(to_value(Fraction(6, 3))) is int
    assert to_value("3/4") == Fraction(3, 4)
    with pytest.raises(TypeError):
        to_value(0.5)
    with pytest.raises(TypeError):
        forward_project(Grid2(2, 1), [0.5, 1.0], [(1, 0)])


@settings(max_examples=40, deadline=None)
@given(instances(dim=3, max_side=6))
def test_projection_compatibility(inst):
    """Fiber sums along x, then 2D line sums in (b, c), equal 3D line sums grouped by (q, r)."""
    grid, dirs, values = inst
    m, n, o = grid.shape
    fiber = [[sum(values[p + m * (q + n * r)] for p in range(m)) for q in range(n)] for r in range(o)]
    page = Grid2(n, o)
    page_vals = [fiber[r][q] for r in range(o) for q in range(n)]
    for d in dirs:
        _, b, c = d
        t3 = forward_project(grid, values, [d])
        if (b, c) == (0, 0):
            # Each 3D line lies in one x-fiber.
            grouped = {}
            for base, s in t3.sums[0].items():
                grouped[base[1:]] = grouped.get(base[1:], 0) + s
            assert grouped == {(q, r): fiber[r][q] for q in range(n) for r in range(o)}
            continue
        t2 = forward_project(page, page_vals, [(b, c)])
        grouped = {}
        for base, s in t3.sums[0].items():
            key2 = min(line_points(page, (b, c), base[1:]), key=page.flat)
            grouped[key2] = grouped.get(key2, 0) + s
        assert grouped == t2.sums[0]


def test_validity():
    D = [normalize_direction(d) for d in EXAMPLE_DIRS]
    assert validity(Grid3(5, 5, 6), D) == "Valid"
    assert validity(Grid3(4, 5, 6), D) == "Nonvalid"
    assert validity(Grid2(8, 7), [(3, -2), (4, -3), (1, -2)]) == "Nonvalid"
    assert is_valid(Grid2(9, 8), [(3, -2), (4, -3), (1, -2)])
    with pytest.raises(ValueError):
        is_valid(Grid2(3, 3), [])


def test_grid_rejects_bad_extents():
    with pytest.raises(ValueError):
        Grid3(0, 1, 1)
    g = Grid3(3, 4, 5)
    assert all(g.point(g.flat(pt)) == pt for pt in itertools.islice(g.points(), 60))
    assert g.flat((1, 2, 3)) == 1 + 3 * (2 + 4 * 3)
