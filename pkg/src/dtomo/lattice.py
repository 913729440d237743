"""Lattice grids, directions, canonical line indexing and line sums.

Points of a grid are integer tuples ``(p, q)`` or ``(p, q, r)``.  They are
stored in flat arrays with index ``p + m * (q + n * r)``, so that flat order
is lexicographic order on ``(r, q, p)``.  A line is identified by the point
of smallest flat index it contains.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from numbers import Rational
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

import numpy as np

Value = Union[int, Fraction]
Point = tuple


class DegenerateDirectionError(ValueError):
    """Raised for the zero vector used as a direction."""


@dataclass(frozen=True)
class Grid3:
    m: int
    n: int
    o: int

    def __post_init__(self):
        if min(self.m, self.n, self.o) < 1:
            raise ValueError(f"grid extents must be positive, got {self.shape}")

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.m, self.n, self.o)

    @property
    def dim(self) -> int:
        return 3

    @property
    def size(self) -> int:
        return self.m * self.n * self.o

    def contains(self, pt) -> bool:
        p, q, r = pt
        return 0 <= p < self.m and 0 <= q < self.n and 0 <= r < self.o

    def flat(self, pt) -> int:
        p, q, r = pt
        return p + self.m * (q + self.n * r)

    def point(self, idx: int) -> tuple[int, int, int]:
        idx, p = divmod(idx, self.m)
        r, q = divmod(idx, self.n)
        return (p, q, r)

    def points(self):
        """All grid points in flat (lexicographic ``(r, q, p)``) order."""
        for r in range(self.o):
            for q in range(self.n):
                for p in range(self.m):
                    yield (p, q, r)


@dataclass(frozen=True)
class Grid2:
    m: int
    n: int

    def __post_init__(self):
        if min(self.m, self.n) < 1:
            raise ValueError(f"grid extents must be positive, got {self.shape}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.m, self.n)

    @property
    def dim(self) -> int:
        return 2

    @property
    def size(self) -> int:
        return self.m * self.n

    def contains(self, pt) -> bool:
        p, q = pt
        return 0 <= p < self.m and 0 <= q < self.n

    def flat(self, pt) -> int:
        p, q = pt
        return p + self.m * q

    def point(self, idx: int) -> tuple[int, int]:
        q, p = divmod(idx, self.m)
        return (p, q)

    def points(self):
        for q in range(self.n):
            for p in range(self.m):
                yield (p, q)

    def as_3d(self) -> Grid3:
        return Grid3(self.m, self.n, 1)


Grid = Union[Grid2, Grid3]


def make_grid(extents: Sequence[int]) -> Grid:
    if len(extents) == 2:
        return Grid2(*extents)
    if len(extents) == 3:
        return Grid3(*extents)
    raise ValueError(f"expected 2 or 3 grid extents, got {len(extents)}")


class Direction3(NamedTuple):
    a: int
    b: int
    c: int


class Direction2(NamedTuple):
    a: int
    b: int
    primitive: bool = True

    @property
    def vector(self) -> tuple[int, int]:
        return (self.a, self.b)


class LineKey(NamedTuple):
    """Direction index and the flat-order-minimal grid point of the line."""

    h: int
    base: tuple


def normalize_direction(raw: Sequence[int]):
    """Return the normalized primitive direction spanning the same line.

    Components are divided by their gcd, then the sign is fixed so that
    ``a >= 0``, ``b >= 0`` if ``a == 0`` and ``c = 1`` if ``a == b == 0``.
    Accepts pairs (returning a primitive :class:`Direction2`) and triples.
    """
    comps = [int(x) for x in raw]
    if len(comps) not in (2, 3):
        raise ValueError(f"direction must have 2 or 3 components, got {raw!r}")
    g = 0
    for x in comps:
        g = gcd(g, x)
    if g == 0:
        raise DegenerateDirectionError(f"degenerate direction {tuple(raw)!r}")
    comps = [x // g for x in comps]
    for x in comps:
        if x != 0:
            if x < 0:
                comps = [-y for y in comps]
            break
    if len(comps) == 2:
        return Direction2(comps[0], comps[1], True)
    return Direction3(*comps)


def project_direction(d: Sequence[int], axis: str) -> Direction2:
    """Drop the coordinate named by ``axis``; no renormalization is done."""
    a, b, c = d[0], d[1], d[2]
    if axis == "x":
        return Direction2(b, c, False)
    if axis == "y":
        return Direction2(a, c, False)
    if axis == "z":
        return Direction2(a, b, False)
    raise ValueError(f"axis must be one of 'x', 'y', 'z', got {axis!r}")


def direction_vector(d, dim: int) -> tuple:
    """Integer vector of a direction, padded with zeros to ``dim`` entries."""
    vec = (d.a, d.b) if isinstance(d, Direction2) else tuple(int(x) for x in d)
    if len(vec) > dim:
        raise ValueError(f"direction {tuple(vec)!r} has more than {dim} components")
    return vec + (0,) * (dim - len(vec))


def _as_3d(grid: Grid, directions) -> tuple[Grid3, list[tuple[int, int, int]]]:
    if isinstance(grid, Grid2):
        vecs = [direction_vector(d, 2) + (0,) for d in directions]
        return grid.as_3d(), vecs
    return grid, [direction_vector(d, 3) for d in directions]


def _lex_positive(vec) -> bool:
    # Lexicographic order of points is on (r, q, p), i.e. reversed tuples.
    for x in reversed(vec):
        if x != 0:
            return x > 0
    return False


def line_index(grid: Grid, d) -> tuple[np.ndarray, np.ndarray]:
    """Label every grid point with the flat index of its line's base point.

    Returns ``(labels, bases)`` where ``labels[i]`` is the position of point
    ``i``'s line in ``bases`` and ``bases`` lists base flat indices in
    increasing order.
    """
    g3, (vec,) = _as_3d(grid, [d])
    if vec == (0, 0, 0):
        raise DegenerateDirectionError("degenerate direction (0, 0, 0)")
    if not _lex_positive(vec):
        vec = tuple(-x for x in vec)
    m, n, o = g3.shape
    r, q, p = np.meshgrid(np.arange(o), np.arange(n), np.arange(m), indexing="ij")
    p, q, r = p.ravel(), q.ravel(), r.ravel()
    # Number of backward steps -vec that stay inside the grid.
    steps = np.full(p.shape, np.iinfo(np.int64).max, dtype=np.int64)
    for coord, comp, ext in ((p, vec[0], m), (q, vec[1], n), (r, vec[2], o)):
        if comp > 0:
            steps = np.minimum(steps, coord // comp)
        elif comp < 0:
            steps = np.minimum(steps, (ext - 1 - coord) // (-comp))
    base = (p - steps * vec[0]) + m * ((q - steps * vec[1]) + n * (r - steps * vec[2]))
    bases, labels = np.unique(base, return_inverse=True)
    return labels.ravel(), bases


def enumerate_lines(grid: Grid, d) -> list[LineKey]:
    """Keys of all lines in direction ``d`` meeting the grid, in base order."""
    _, bases = line_index(grid, d)
    return [LineKey(0, grid.point(int(b))) for b in bases]


def line_points(grid: Grid, d, base) -> list[tuple]:
    """Grid points of the line through ``base`` in direction ``d``."""
    vec = direction_vector(d, grid.dim)
    if not any(vec):
        raise DegenerateDirectionError("degenerate direction")
    out = []
    for sign in (1, -1):
        t = 0 if sign == 1 else -1
        while True:
            pt = tuple(x + t * v for x, v in zip(base, vec))
            if not grid.contains(pt):
                break
            out.append(pt)
            t += sign
    return sorted(out, key=grid.flat)


def to_value(x) -> Value:
    """Coerce to an exact int or Fraction; floats are rejected."""
    if isinstance(x, bool):
        raise TypeError("booleans are not grid values")
    if isinstance(x, int):
        return x
    if isinstance(x, Rational):
        f = Fraction(x)
        return f.numerator if f.denominator == 1 else f
    if isinstance(x, str):
        return to_value(Fraction(x))
    raise TypeError(f"values must be exact integers or rationals, got {type(x).__name__}")


@dataclass
class LineSumTable:
    """Per direction, a map from line base point to exact line sum."""

    grid: Grid
    directions: list
    sums: list[dict]

    def __getitem__(self, key: LineKey) -> Value:
        return self.sums[key.h][tuple(key.base)]

    def keys(self):
        for h, table in enumerate(self.sums):
            for base in table:
                yield LineKey(h, base)

    def total(self, h: int) -> Value:
        return sum(self.sums[h].values(), 0)

    def __eq__(self, other):
        if not isinstance(other, LineSumTable):
            return NotImplemented
        return (
            self.grid == other.grid
            and [tuple(d) for d in self.directions] == [tuple(d) for d in other.directions]
            and self.sums == other.sums
        )


def as_flat_values(grid: Grid, f) -> list[Value]:
    """Accept a flat sequence, a mapping point -> value, or a numpy array."""
    if isinstance(f, Mapping):
        out = [0] * grid.size
        for pt, v in f.items():
            out[grid.flat(tuple(pt))] = to_value(v)
        return out
    if isinstance(f, np.ndarray) and f.ndim > 1:
        # Arrays are indexed [p, q] or [p, q, r].
        f = f.transpose().ravel()
    vals = [to_value(v) for v in (f.tolist() if isinstance(f, np.ndarray) else f)]
    if len(vals) != grid.size:
        raise ValueError(f"expected {grid.size} values, got {len(vals)}")
    return vals


def forward_project(grid: Grid, f, directions) -> LineSumTable:
    """Exact line sums of ``f`` along every line of every direction."""
    vals = as_flat_values(grid, f)
    sums = []
    for d in directions:
        labels, bases = line_index(grid, d)
        acc: list[Value] = [0] * len(bases)
        for i, lab in enumerate(labels.tolist()):
            acc[lab] += vals[i]
        sums.append({grid.point(int(b)): to_value(s) for b, s in zip(bases.tolist(), acc)})
    return LineSumTable(grid, list(directions), sums)


def component_sums(directions, dim: int) -> tuple[int, ...]:
    """Sums of absolute direction components per coordinate."""
    vecs = [direction_vector(d, dim) for d in directions]
    return tuple(sum(abs(v[i]) for v in vecs) for i in range(dim))


def is_valid(grid: Grid, directions) -> bool:
    """True iff every extent strictly exceeds the matching component sum."""
    if not directions:
        raise ValueError("direction set must be nonempty")
    sums = component_sums(directions, grid.dim)
    return all(s < ext for s, ext in zip(sums, grid.shape))


def validity(grid: Grid, directions) -> str:
    return "Valid" if is_valid(grid, directions) else "Nonvalid"


def normalize_directions(raw: Iterable[Sequence[int]]) -> list:
    return [normalize_direction(r) for r in raw]
