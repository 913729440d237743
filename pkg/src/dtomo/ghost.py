"""Elementary switching functions, their shifts, and solution-space size."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .lattice import Grid, component_sums, direction_vector, is_valid

MAX_DIRECTIONS = 30


class GhostResourceError(RuntimeError):
    """Too many directions for exact construction of the elementary ghost."""


@dataclass(frozen=True)
class GhostFunction:
    """Sparse signed-integer function whose line sums all vanish.

    ``values`` maps points to nonzero integers.  ``box`` is the inclusive
    upper corner of the bounding box ``[0, box[i]]`` per coordinate and
    ``anchor`` is the point of value 1 coming from the empty sum.
    """

    values: dict
    box: tuple
    anchor: tuple

    @property
    def support(self) -> list[tuple]:
        return sorted(self.values, key=lambda pt: pt[::-1])

    def shifted(self, u) -> dict:
        return {tuple(x + s for x, s in zip(pt, u)): v for pt, v in self.values.items()}


@dataclass(frozen=True)
class SwitchingUnion:
    """The union ``points`` of all shifted elementary switching domains.

    ``shift_box`` holds the number of admissible shifts per coordinate; the
    shift set is the dense box ``[0, shift_box[i])``.  Every count is zero
    for a nonvalid pair.
    """

    points: list
    shift_box: tuple
    ghost: GhostFunction | None = field(default=None, compare=False)

    @property
    def n_shifts(self) -> int:
        return int(np.prod(self.shift_box)) if self.shift_box else 0

    def shifts(self):
        return product(*(range(k) for k in self.shift_box))

    def __contains__(self, pt) -> bool:
        return tuple(pt) in self._set

    @property
    def _set(self):
        cached = self.__dict__.get("_cache")
        if cached is None:
            cached = frozenset(self.points)
            object.__setattr__(self, "_cache", cached)
        return cached


def ghost_anchor(directions, dim: int) -> tuple:
    vecs = [direction_vector(d, dim) for d in directions]
    return (0,) + tuple(
        sum(-v[i] for v in vecs if v[i] < 0) for i in range(1, dim)
    )


def elementary_ghost(directions, dim: int = 3, counter=None) -> GhostFunction:
    """Build the elementary switching function of a direction set.

    The value at ``x`` is the number of ways ``x - anchor`` is a sum of
    distinct directions, counted with sign ``(-1) ** (number of terms)``.
    It is computed as the product of the two-term factors ``1 - X**d``.
    """
    if not directions:
        raise ValueError("direction set must be nonempty")
    if len(directions) > MAX_DIRECTIONS:
        raise GhostResourceError(
            f"{len(directions)} directions exceed the limit of {MAX_DIRECTIONS}"
        )
    anchor = ghost_anchor(directions, dim)
    poly = {anchor: 1}
    for d in directions:
        vec = direction_vector(d, dim)
        nxt = dict(poly)
        for pt, v in poly.items():
            key = tuple(x + s for x, s in zip(pt, vec))
            nxt[key] = nxt.get(key, 0) - v
            if counter is not None:
                counter.add_sub += 1
        poly = {pt: v for pt, v in nxt.items() if v != 0}
    return GhostFunction(poly, component_sums(directions, dim), anchor)


def shift_box(grid: Grid, directions) -> tuple:
    if not is_valid(grid, directions):
        return tuple(0 for _ in grid.shape)
    sums = component_sums(directions, grid.dim)
    return tuple(ext - s for ext, s in zip(grid.shape, sums))


def switching_mask(grid: Grid, directions, ghost: GhostFunction | None = None) -> np.ndarray:
    """Boolean array indexed ``[r, q, p]`` (2D: ``[q, p]``) marking the union."""
    shape_rev = grid.shape[::-1]
    mask = np.zeros(shape_rev, dtype=bool)
    box = shift_box(grid, directions)
    if not all(box):
        return mask
    ghost = ghost or elementary_ghost(directions, grid.dim)
    for pt in ghost.values:
        sl = tuple(slice(c, c + k) for c, k in zip(pt, box))[::-1]
        mask[sl] = True
    return mask


def switching_union(grid: Grid, directions) -> SwitchingUnion:
    """All shifts of the elementary ghost fitting in the grid and their union."""
    box = shift_box(grid, directions)
    if not all(box):
        return SwitchingUnion([], box, None)
    ghost = elementary_ghost(directions, grid.dim)
    mask = switching_mask(grid, directions, ghost)
    coords = np.argwhere(mask)
    pts = [tuple(int(x) for x in c[::-1]) for c in coords]
    return SwitchingUnion(pts, box, ghost)


def solution_space_dim(grid: Grid, directions) -> int:
    box = shift_box(grid, directions)
    return int(np.prod(box))
