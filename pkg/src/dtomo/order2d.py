"""Weights of lattice points relative to a border chain, and solving orders.

A fan is built from directions ``(a, b)`` with ``a > 0 > b`` as seen from one
corner of a rectangular page.  Every point of the page gets a weight; points
of weight below 1 lie strictly between the corner and the border chain and
can be solved in order of increasing weight, each one along the direction
of the fan triangle that contains it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, lcm, log2
from typing import NamedTuple

from .hull import BorderFan, border_fan
from .lattice import direction_vector


class OutsideFanError(ValueError):
    """Point is not inside the angular span of the fan."""


def triangle_index(p: int, q: int, fan: BorderFan) -> int:
    """Index ``H`` (1-based) of the fan triangle containing ``(p, q)``.

    Points on the ray shared by two triangles get the smaller index.
    """
    if p < 0 or q < 0 or (p == 0 and q == 0):
        raise OutsideFanError(f"point {(p, q)} is outside the fan span")
    if fan.k == 0:
        raise OutsideFanError("empty fan")
    bp = fan.border_points
    for H in range(1, fan.k + 1):
        X0, Y0 = bp[H - 1]
        X1, Y1 = bp[H]
        # Y0/X0 <= q/p <= Y1/X1 with 1/0 read as infinity.
        if Y0 * p <= q * X0 and q * X1 <= p * Y1:
            return H
    raise OutsideFanError(f"point {(p, q)} is outside the fan span")


def weight(p: int, q: int, fan: BorderFan) -> Fraction:
    """Exact weight of ``(p, q)``; 1 on the border chain, 0 at the origin."""
    if p == 0 and q == 0:
        return Fraction(0)
    H = triangle_index(p, q, fan)
    a, b = fan.directions[H - 1]
    b = -b
    sum_b = sum(-bb for _, bb in fan.directions[:H])
    sum_a = sum(aa for aa, _ in fan.directions[H:])
    return Fraction(a * q + b * p, a * sum_b + b * sum_a)


class Corner(NamedTuple):
    """Grid corner as a pair of flags: 0 for the low end of an axis, 1 for the high end."""

    sx: int
    sy: int


CORNERS = (Corner(0, 0), Corner(1, 0), Corner(0, 1), Corner(1, 1))


@dataclass(frozen=True)
class CornerFrame:
    """Reflection of page coordinates that puts a corner at the origin."""

    corner: Corner
    extents: tuple

    def __call__(self, pt):
        x, y = pt
        M, N = self.extents
        return (M - 1 - x if self.corner.sx else x, N - 1 - y if self.corner.sy else y)

    def direction(self, vec):
        a, b = vec
        return (-a if self.corner.sx else a, -b if self.corner.sy else b)


def corner_transform(directions, corner: Corner, extents=(1, 1)):
    """Fan of the directions pointing into the page from ``corner``.

    Directions are taken as undirected: ``(a, b)`` and ``(-a, -b)`` are the
    same line direction.  Directions with a zero component cannot enter any
    fan and are skipped, as is ``(0, 0)``.  Returns ``(fan, frame)``; the
    fan's ``members`` refer to positions in ``directions``.
    """
    corner = Corner(*corner)
    frame = CornerFrame(corner, tuple(extents))
    picked = []
    for i, d in enumerate(directions):
        a, b = frame.direction(direction_vector(d, 2))
        if a == 0 or b == 0:
            continue
        if a < 0:
            a, b = -a, -b
        if b < 0:
            picked.append(((a, b), i))
    picked.sort(key=lambda item: Fraction(-item[0][1], item[0][0]))
    fan = border_fan([v for v, _ in picked], [(i,) for _, i in picked])
    return fan, frame


class OrderEntry(NamedTuple):
    point: tuple
    H: int
    corner: Corner
    weight: Fraction


@dataclass
class ReconOrder:
    entries: list

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def covered(self) -> set:
        return {e.point for e in self.entries}


class FanKeys:
    """Integer weight keys ``L * weight`` computed with additions only.

    ``L`` is the lcm of the weight denominators; per triangle the key is the
    linear form ``alpha[H] * y + beta[H] * x`` and the weight is the minimum
    over all triangles.  Only the constructor multiplies or divides.
    """

    def __init__(self, fan: BorderFan, counter=None):
        self.fan = fan
        dens = fan.denominators
        self.L = lcm(*dens) if dens else 1
        self.alpha = []
        self.beta = []
        for (a, b), den in zip(fan.directions, dens):
            s = self.L // den
            self.alpha.append(a * s)
            self.beta.append(-b * s)
        if counter is not None:
            counter.mul_div += 4 * len(dens)

    def keys(self, xmax: int, ymax: int, include_all: bool = False, counter=None):
        """Yield ``(key, H, x, y)`` for local points with ``x < xmax, y < ymax``.

        Without ``include_all`` only points of key below ``L`` are produced.
        """
        k = self.fan.k
        if k == 0:
            return
        if not include_all:
            P0, _ = self.fan.border_points[0]
            _, Qk = self.fan.border_points[-1]
            xmax, ymax = min(xmax, P0), min(ymax, Qk)
        alpha, beta, L = self.alpha, self.beta, self.L
        row = [0] * k
        adds = cmps = 0
        for y in range(ymax):
            cur = list(row)
            for x in range(xmax):
                best, H = cur[0], 1
                for h in range(1, k):
                    if cur[h] < best:
                        best, H = cur[h], h + 1
                cmps += k
                if include_all or best < L:
                    yield best, H, x, y
                else:
                    # Keys never decrease along a row.
                    break
                for h in range(k):
                    cur[h] += beta[h]
                adds += k
            for h in range(k):
                row[h] += alpha[h]
            adds += k
        if counter is not None:
            counter.add_sub += adds
            counter.comparisons += cmps


def _sort_cost(n: int) -> int:
    return n * ceil(log2(n)) if n > 1 else 0


def corner_order(
    extents,
    fan: BorderFan,
    corner: Corner = Corner(0, 0),
    include_all: bool = False,
    counter=None,
    keys: FanKeys | None = None,
) -> ReconOrder:
    """Page points ordered by weight relative to ``corner``.

    By default only points of weight below 1 are included.  Ties in weight
    are broken by increasing local ``y`` and then increasing local ``x``.
    Entries carry grid coordinates.
    """
    corner = Corner(*corner)
    if fan.k == 0:
        return ReconOrder([])
    frame = CornerFrame(corner, tuple(extents))
    keys = keys or FanKeys(fan, counter)
    raw = [(key, y, x, H) for key, H, x, y in keys.keys(extents[0], extents[1], include_all, counter)]
    raw.sort()
    if counter is not None:
        counter.comparisons += _sort_cost(len(raw))
    L = keys.L
    return ReconOrder(
        [OrderEntry(frame((x, y)), H, corner, Fraction(key, L)) for key, y, x, H in raw]
    )


def corner_orders(extents, directions, include_all_corner: Corner | None = None, counter=None):
    """Orders from all four corners for a possibly non-primitive direction list.

    Returns a list of ``(order, fan)`` pairs.  Points may appear in more than
    one corner's order only when ``include_all_corner`` is set.
    """
    out = []
    for corner in CORNERS:
        fan, _ = corner_transform(directions, corner, extents)
        order = corner_order(extents, fan, corner, include_all=(corner == include_all_corner), counter=counter)
        out.append((order, fan))
    return out


def weight_map(extents, directions, corner: Corner = Corner(0, 0)) -> dict:
    """Per-pixel weights and order numbers from one corner, for display."""
    fan, frame = corner_transform(directions, corner, extents)
    order = corner_order(extents, fan, corner, include_all=True)
    rows = []
    for number, e in enumerate(order, start=1):
        rows.append({"point": list(e.point), "weight": e.weight, "order": number, "H": e.H})
    return {"fan": fan, "pixels": rows}
