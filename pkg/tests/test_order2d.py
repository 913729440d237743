import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dtomo.hull import border_fan
from dtomo.lattice import Direction2, Grid2, line_points
from dtomo.order2d import (
    CORNERS,
    Corner,
    FanKeys,
    OutsideFanError,
    corner_order,
    corner_transform,
    triangle_index,
    weight,
    weight_map,
)

from oracles import ray_ratio_oracle

CHAIN_A = [(3, -2), (4, -3), (1, -2)]
CHAIN_B = [(3, -2), (2, -2), (3, -6)]


def fans(max_k=4, bound=6):
    vec = st.tuples(st.integers(1, bound), st.integers(-bound, -1))
    return st.lists(vec, min_size=1, max_size=max_k).map(
        lambda vs: sorted(vs, key=lambda v: Fraction(-v[1], v[0]))
    )


def test_triangle_index_examples():
    fan = border_fan(CHAIN_B)
    assert triangle_index(4, 2, fan) == 2
    assert triangle_index(6, 0, fan) == 1
    assert triangle_index(0, 6, fan) == 3
    # On the ray through (5, 2): both triangles 1 and 2 qualify, the smaller wins.
    assert triangle_index(5, 2, fan) == 1
    with pytest.raises(OutsideFanError):
        triangle_index(-1, 2, fan)
    with pytest.raises(OutsideFanError):
        triangle_index(0, 0, fan)


def test_reference_chain_weights():
    fan = border_fan(CHAIN_B)
    assert weight(6, 0, fan) == Fraction(3, 4)
    assert weight(0, 6, fan) == Fraction(3, 5)
    assert weight(4, 2, fan) == Fraction(6, 7)
    assert weight(3, 3, fan) == Fraction(6, 7)
    assert weight(2, 4, fan) == Fraction(4, 5)
    assert ray_ratio_oracle(2, 4, fan) == Fraction(4, 5)
    for P, Q in fan.border_points:
        assert weight(P, Q, fan) == 1
    assert weight(0, 0, fan) == 0


@settings(max_examples=100, deadline=None)
@given(fans())
def test_weight_matches_ray_oracle(dirs):
    fan = border_fan(dirs)
    P0, Qk = fan.border_points[0][0], fan.border_points[-1][1]
    for p in range(P0 + 2):
        for q in range(Qk + 2):
            w = weight(p, q, fan)
            assert w == ray_ratio_oracle(p, q, fan)
            assert (w == 0) == ((p, q) == (0, 0))


@settings(max_examples=100, deadline=None)
@given(fans())
def test_integer_keys_match_weights(dirs):
    fan = border_fan(dirs)
    keys = FanKeys(fan)
    P0, Qk = fan.border_points[0][0], fan.border_points[-1][1]
    for key, H, x, y in keys.keys(P0 + 2, Qk + 2, include_all=True):
        assert Fraction(key, keys.L) == weight(x, y, fan)
        if (x, y) != (0, 0):
            assert H == triangle_index(x, y, fan)


@settings(max_examples=100, deadline=None)
@given(fans())
def test_weight_strictly_decreases_along_triangle_direction(dirs):
    fan = border_fan(dirs)
    P0, Qk = fan.border_points[0][0], fan.border_points[-1][1]
    M, N = P0 + 3, Qk + 3
    for p in range(M):
        for q in range(N):
            if (p, q) == (0, 0):
                continue
            w = weight(p, q, fan)
            if w >= 1:
                continue
            H = triangle_index(p, q, fan)
            a, b = fan.directions[H - 1]
            for t in range(-(M + N), M + N + 1):
                x, y = p + t * a, q + t * b
                if t and 0 <= x < M and 0 <= y < N:
                    assert weight(x, y, fan) < w, ((p, q), t)


@settings(max_examples=60, deadline=None)
@given(fans())
def test_piecewise_linear(dirs):
    fan = border_fan(dirs)
    for H, (o, B0, B1) in enumerate(fan.triangles, start=1):
        det = B0[0] * B1[1] - B0[1] * B1[0]
        xs = range(0, max(B0[0], B1[0]) + 1)
        ys = range(0, max(B0[1], B1[1]) + 1)
        for x in xs:
            for y in ys:
                # Barycentric coordinates of (x, y) w.r.t. B0, B1; the linear interpolant is u + v.
                u = Fraction(x * B1[1] - y * B1[0], det)
                v = Fraction(B0[0] * y - B0[1] * x, det)
                if u >= 0 and v >= 0 and u + v <= 1 and (x, y) != (0, 0):
                    assert weight(x, y, fan) == u + v


def test_single_direction_order():
    fan, _ = corner_transform([(1, -1)], Corner(0, 0), (3, 3))
    order = corner_order((3, 3), fan, include_all=True)
    sums = [e.point[0] + e.point[1] for e in order]
    assert sums == sorted(sums)
    assert [e.point for e in order][:3] == [(0, 0), (1, 0), (0, 1)]
    assert all(e.weight == e.point[0] + e.point[1] for e in order)


def test_empty_direction_set():
    fan, _ = corner_transform([], Corner(0, 0), (3, 3))
    assert fan.k == 0
    assert len(corner_order((3, 3), fan)) == 0


def test_weight_map_8x7():
    wm = weight_map((8, 7), CHAIN_A)
    px = wm["pixels"]
    ws = [p["weight"] for p in px]
    assert ws == sorted(ws)
    assert [p["order"] for p in px] == list(range(1, 57))
    by_pt = {tuple(p["point"]): p["weight"] for p in px}
    assert by_pt[(5, 2)] == 1 and by_pt[(1, 5)] == 1
    inside = [p for p in px if p["weight"] < 1]
    # Ties in weight are ordered by y, then x.
    for a, b in zip(px, px[1:]):
        if a["weight"] == b["weight"]:
            assert (a["point"][1], a["point"][0]) < (b["point"][1], b["point"][0])
    assert len(inside) == len(corner_order((8, 7), wm["fan"]))


def test_corner_transform_examples():
    fan, frame = corner_transform([(1, -2)], Corner(0, 0), (5, 5))
    assert fan.directions == ((1, -2),) and frame((1, 2)) == (1, 2)
    fan, frame = corner_transform([(1, 2)], Corner(1, 0), (5, 5))
    assert fan.directions == ((1, -2),)
    assert frame((0, 3)) == (4, 3) and frame(frame((2, 1))) == (2, 1)
    mixed = [(1, 2), (1, -2)]
    fan, _ = corner_transform(mixed, Corner(0, 1), (5, 5))
    assert fan.members == ((0,),)
    fan, _ = corner_transform(mixed, Corner(0, 0), (5, 5))
    assert fan.members == ((1,),)
    fan, _ = corner_transform(mixed, Corner(1, 1), (5, 5))
    assert fan.members == ((1,),)
    # Axis-parallel and zero directions enter no fan.
    for c in CORNERS:
        fan, _ = corner_transform([(1, 0), (0, 1), Direction2(0, 0, False)], c, (4, 4))
        assert fan.k == 0


def _replay(extents, dirs, corner):
    fan, _ = corner_transform(dirs, corner, extents)
    if any(len(m) > 1 for m in fan.members):
        return None
    grid = Grid2(*extents)
    solved = set()
    for e in corner_order(extents, fan, corner):
        (i,) = fan.members[e.H - 1]
        line = line_points(grid, dirs[i], e.point)
        pending = [pt for pt in line if pt not in solved and pt != e.point]
        assert not pending, (e, pending)
        solved.add(e.point)
    return len(solved)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_schedule_soundness(seed):
    rng = random.Random(seed)
    dirs = []
    for _ in range(rng.randint(1, 4)):
        v = (rng.randint(-4, 4), rng.randint(-4, 4))
        if v != (0, 0):
            dirs.append(Direction2(v[0], v[1], False))
    if not dirs:
        return
    extents = (rng.randint(1, 12), rng.randint(1, 12))
    for corner in CORNERS:
        _replay(extents, dirs, corner)


def test_corner_order_counts_ops():
    from dtomo.counting import OpCounter

    c = OpCounter()
    fan, _ = corner_transform(CHAIN_B, Corner(0, 0), (9, 11))
    corner_order((9, 11), fan, counter=c)
    assert c.add_sub > 0 and c.comparisons > 0 and c.mul_div == 4 * fan.k
    assert c.value_mul_div == 0
