"""Reconstruction from exact line sums.

All values are found by subtraction: a line with exactly one unknown point
hands its residual sum to that point.  The 3D pipeline orders the work by
projecting onto coordinate planes and solving whole fibers at a time, then
finishes slice by slice from the top, injecting free values where the line
sums leave a choice.  A count-based peeling pass after every step picks up
anything the ordering left behind.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from math import ceil, log2
from typing import Mapping, Sequence

import numpy as np

from .counting import OpCounter
from .ghost import elementary_ghost, shift_box, solution_space_dim, switching_mask
from .lattice import (
    Grid,
    Grid2,
    Grid3,
    LineKey,
    LineSumTable,
    Value,
    component_sums,
    direction_vector,
    forward_project,
    line_index,
    to_value,
)
from .order2d import CORNERS, Corner, CornerFrame, FanKeys, corner_transform

FORCED = "forced"
FREE = "free"
DEPENDENT = "free-dependent"


class InconsistentLineSumsError(ValueError):
    """Line sums admit no solution; ``line`` names a line that cannot be met."""

    def __init__(self, line: LineKey, residual):
        self.line = line
        self.residual = residual
        super().__init__(
            f"inconsistent line sums: line {tuple(line.base)} in direction #{line.h} "
            f"is off by {residual}"
        )


class PolicyError(ValueError):
    """Free-value policy does not fit the instance."""


class StallError(RuntimeError):
    """Peeling stopped with unknown points left and no free position to fill."""

    def __init__(self, message, unknown):
        self.unknown = unknown
        super().__init__(f"{message}; {len(unknown)} unknown points, first {unknown[:10]}")


@dataclass
class FreeChoicePolicy:
    """Values given to free positions.

    ``values`` is either a sequence used in assignment order or a mapping
    from free position to value.  Positions without an explicit value get
    ``default``.
    """

    default: Value = 0
    values: Sequence | Mapping | None = None

    def check(self, dim: int):
        if self.values is not None and len(self.values) != dim:
            raise PolicyError(
                f"policy gives {len(self.values)} free values but the solution space has dimension {dim}"
            )

    def value(self, k: int, point) -> Value:
        if self.values is None:
            return to_value(self.default)
        if isinstance(self.values, Mapping):
            key = tuple(point)
            if key not in self.values:
                raise PolicyError(f"policy has no value for free position {key}")
            return to_value(self.values[key])
        return to_value(self.values[k])


class PeelState:
    """Residual sums and unknown counts of every line, with a FIFO worklist."""

    def __init__(self, grid: Grid3, vecs, sums: list[list], counter: OpCounter, labels=None):
        self.grid = grid
        self.vecs = vecs
        self.counter = counter
        N = grid.size
        self.values: list = [None] * N
        self.n_unknown = N
        self.labels = []
        self.bases = []
        self.residual = []
        self.count = []
        self.idsum = []
        idx = np.arange(N, dtype=np.int64)
        for h, vec in enumerate(vecs):
            lab, bases = labels[h] if labels else line_index(grid, vec)
            self.labels.append(lab.tolist())
            self.bases.append(bases.tolist())
            self.count.append(np.bincount(lab, minlength=len(bases)).tolist())
            self.idsum.append(np.bincount(lab, weights=idx, minlength=len(bases)).astype(np.int64).tolist())
            self.residual.append(list(sums[h]))
        self.queue = deque(
            (h, l) for h in range(len(vecs)) for l, c in enumerate(self.count[h]) if c == 1
        )
        self.log: list = []

    def line_key(self, h: int, l: int) -> LineKey:
        return LineKey(h, self.grid.point(self.bases[h][l]))

    def assign(self, i: int, value, how: str = "peel"):
        self.values[i] = value
        self.n_unknown -= 1
        self.log.append((i, how))
        c = self.counter
        c.assignments += 1
        for h in range(len(self.vecs)):
            l = self.labels[h][i]
            self.residual[h][l] -= value
            cnt = self.count[h][l] - 1
            self.count[h][l] = cnt
            self.idsum[h][l] -= i
            if cnt == 1:
                self.queue.append((h, l))
            elif cnt == 0:
                c.comparisons += 1
                if self.residual[h][l] != 0:
                    raise InconsistentLineSumsError(self.line_key(h, l), self.residual[h][l])
        d = len(self.vecs)
        c.add_sub += 2 * d
        c.comparisons += d

    def solve_line(self, h: int, l: int, how: str) -> bool:
        self.counter.comparisons += 1
        if self.count[h][l] != 1:
            return False
        i = self.idsum[h][l]
        # The residual of a line with one unknown is that point's value.
        self.assign(i, self.residual[h][l], how)
        return True

    def try_point(self, i: int, hs, how: str) -> bool:
        self.counter.comparisons += 1
        if self.values[i] is not None:
            return True
        for h in hs:
            if self.solve_line(h, self.labels[h][i], how):
                return True
        return False

    def peel(self) -> int:
        solved = 0
        queue = self.queue
        while queue:
            h, l = queue.popleft()
            if self.solve_line(h, l, "peel"):
                solved += 1
        return solved

    def unknown_points(self) -> list:
        return [self.grid.point(i) for i, v in enumerate(self.values) if v is None]


@dataclass
class ReconResult:
    grid: Grid
    directions: list
    values: list
    provenance: list
    free_positions: list
    ops: OpCounter
    stats: dict = field(default_factory=dict)
    trace: dict = field(default_factory=dict)

    def __getitem__(self, pt) -> Value:
        return self.values[self.grid.flat(tuple(pt))]

    @property
    def n_free(self) -> int:
        return len(self.free_positions)

    def as_dict(self) -> dict:
        return {pt: self.values[i] for i, pt in enumerate(self.grid.points())}


def _table_to_lists(grid: Grid, linesums: LineSumTable, vecs3, grid3: Grid3):
    """Line sums per direction aligned with the engine's line labels."""
    if len(linesums.sums) != len(vecs3):
        raise ValueError(
            f"line-sum table has {len(linesums.sums)} directions, expected {len(vecs3)}"
        )
    out, labels = [], []
    for h, vec in enumerate(vecs3):
        lab, bases = line_index(grid3, vec)
        table = linesums.sums[h]
        if len(table) != len(bases):
            raise ValueError(
                f"direction #{h}: expected {len(bases)} line sums, got {len(table)}"
            )
        row = []
        for b in bases.tolist():
            pt = grid.point(b)
            if pt not in table:
                raise ValueError(f"direction #{h}: missing line sum for base point {pt}")
            row.append(to_value(table[pt]))
        out.append(row)
        labels.append((lab, bases))
    return out, labels


class _Pipeline:
    """One reconstruction run over a 3D grid (2D grids have depth 1)."""

    def __init__(self, grid: Grid, directions, linesums: LineSumTable, policy: FreeChoicePolicy | None):
        if not directions:
            raise ValueError("direction set must be nonempty")
        self.grid = grid
        self.directions = list(directions)
        self.g3 = grid.as_3d() if isinstance(grid, Grid2) else grid
        self.vecs = [direction_vector(d, grid.dim) + (0,) * (3 - grid.dim) for d in directions]
        self.counter = OpCounter()
        sums, labels = _table_to_lists(grid, linesums, self.vecs, self.g3)
        self.state = PeelState(self.g3, self.vecs, sums, self.counter, labels)
        self.policy = policy or FreeChoicePolicy()
        self.dim = solution_space_dim(self.g3, self.vecs)
        self.policy.check(self.dim)
        self.free: list = []
        self.stats: dict = {}
        self.trace: dict = {}
        self.sums = component_sums(self.vecs, 3)
        self.box = shift_box(self.g3, self.vecs)
        self.ghost = elementary_ghost(self.vecs, 3, self.counter)
        sup = self.ghost.values
        # Pivot: highest slice first, then smallest (q, p).
        self.pivot = min(sup, key=lambda pt: (-pt[2], pt[1], pt[0]))

    # -- bookkeeping -----------------------------------------------------

    def _record(self, name: str, before: int, scheduled: int):
        st = self.state
        peeled = st.peel()
        entry = self.stats.setdefault(name, {"schedule": 0, "peel": 0})
        entry["schedule"] += scheduled
        entry["peel"] += peeled
        return before - st.n_unknown

    # -- steps -----------------------------------------------------------

    def _fiber_step(self, axis: str, corners, depth: int, orders_cache: dict) -> int:
        """Solve whole fibers along ``axis`` for pages ordered by weight.

        Pages live in the plane of the two other coordinates, the second of
        which is always ``r``; only rows ``r < depth`` exist.
        """
        m, n, o = self.g3.shape
        st = self.state
        if axis == "x":
            extents, fiber_len = (n, o), m
            proj = [(v[1], v[2]) for v in self.vecs]
        else:
            extents, fiber_len = (m, o), n
            proj = [(v[0], v[2]) for v in self.vecs]
        solved = 0
        for corner in corners:
            key = (axis, corner)
            if key not in orders_cache:
                fan, _ = corner_transform(proj, corner, extents)
                local = []
                if fan.k:
                    keys = FanKeys(fan, self.counter)
                    local = sorted(
                        (k, y, x, H) for k, H, x, y in keys.keys(extents[0], extents[1], False, self.counter)
                    )
                    self.counter.comparisons += _sort_cost(len(local))
                orders_cache[key] = (fan, local)
            fan, local = orders_cache[key]
            frame = CornerFrame(corner, (extents[0], depth))
            for _, y, x, H in local:
                if y >= depth:
                    continue
                u, r = frame((x, y))
                hs = fan.members[H - 1]
                for t in range(fiber_len):
                    pt = (t, u, r) if axis == "x" else (u, t, r)
                    i = pt[0] + m * (pt[1] + n * pt[2])
                    if st.values[i] is None and st.try_point(i, hs, f"step-{axis}"):
                        solved += 1
        return solved

    def _plane_orders(self, zero_c):
        m, n, _ = self.g3.shape
        out = []
        for corner in CORNERS:
            fan, frame = corner_transform([(self.vecs[h][0], self.vecs[h][1]) for h in zero_c], corner, (m, n))
            if not fan.k:
                continue
            keys = FanKeys(fan, self.counter)
            local = sorted((k, y, x, H) for k, H, x, y in keys.keys(m, n, False, self.counter))
            self.counter.comparisons += _sort_cost(len(local))
            pts = [(frame((x, y)), tuple(zero_c[j] for j in fan.members[H - 1])) for _, y, x, H in local]
            out.append(pts)
        return out

    def _solve_plane(self, r: int, plane_orders) -> None:
        """Finish slice ``r`` as a planar problem in the directions with ``c = 0``."""
        m, n, _ = self.g3.shape
        st = self.state
        before = st.n_unknown
        scheduled = 0
        base = m * n * r
        for pts in plane_orders:
            for (p, q), hs in pts:
                i = base + p + m * q
                if st.values[i] is None and st.try_point(i, hs, "plane"):
                    scheduled += 1
        self._record("plane", before, scheduled)
        if not all(self.box):
            return
        ur = r - self.pivot[2]
        if not 0 <= ur < self.box[2]:
            return
        pivots = [
            (self.pivot[0] + up, self.pivot[1] + uq, r)
            for uq in range(self.box[1])
            for up in range(self.box[0])
        ]
        for pt in pivots:
            i = self.g3.flat(pt)
            if st.values[i] is not None:
                continue
            val = self.policy.value(len(self.free), pt[: self.grid.dim])
            st.assign(i, val, "free")
            self.free.append(pt)
            self._record("free", st.n_unknown, 0)

    def _column_step(self, rows: int) -> int:
        """Order ``(p, q)`` columns of the bottom ``rows`` slices by weight."""
        m, n, _ = self.g3.shape
        st = self.state
        proj = [(v[0], v[1]) for v in self.vecs]
        solved = 0
        full = None
        for corner in CORNERS:
            fan, _ = corner_transform(proj, corner, (m, n))
            if fan.k and full is None:
                full = corner
        for corner in CORNERS:
            fan, frame = corner_transform(proj, corner, (m, n))
            if not fan.k:
                continue
            keys = FanKeys(fan, self.counter)
            local = sorted((k, y, x, H) for k, H, x, y in keys.keys(m, n, corner == full, self.counter))
            self.counter.comparisons += _sort_cost(len(local))
            for _, y, x, H in local:
                p, q = frame((x, y))
                hs = fan.members[H - 1]
                for r in range(rows):
                    i = p + m * (q + n * r)
                    if st.values[i] is None and st.try_point(i, hs, "step-z"):
                        solved += 1
        return solved

    def run(self) -> ReconResult:
        m, n, o = self.g3.shape
        st = self.state
        top_corners = (Corner(0, 1), Corner(1, 1))
        cache: dict = {}
        sc = self.sums[2]

        before = st.n_unknown
        self._record("step1", before, self._fiber_step("x", CORNERS, o, cache))
        before = st.n_unknown
        scheduled = self._fiber_step("y", CORNERS, o, cache)
        top = o - 1
        self.trace["top_slice_unknown_after_steps_1_2"] = [
            (p, q, top) for q in range(n) for p in range(m) if st.values[p + m * (q + n * top)] is None
        ]
        self._record("step2", before, scheduled)

        zero_c = [h for h, v in enumerate(self.vecs) if v[2] == 0]
        plane_orders = self._plane_orders(zero_c) if zero_c else []
        for r in range(o - 1, sc - 1, -1):
            if r < o - 1:
                before = st.n_unknown
                scheduled = self._fiber_step("x", top_corners, r + 1, cache)
                scheduled += self._fiber_step("y", top_corners, r + 1, cache)
                self._record("step3-refresh", before, scheduled)
            self._solve_plane(r, plane_orders)

        rows = min(sc, o)
        if rows and st.n_unknown:
            before = st.n_unknown
            self._record("step4", before, self._column_step(rows))
        st.peel()
        if st.n_unknown:
            raise StallError("reconstruction stalled", st.unknown_points())
        if len(self.free) != self.dim:
            raise StallError(
                f"used {len(self.free)} free values, expected {self.dim}", st.unknown_points()
            )
        return self._result()

    def _result(self) -> ReconResult:
        grid = self.grid
        mask = switching_mask(self.g3, self.vecs, self.ghost).ravel()
        free_idx = {self.g3.flat(pt) for pt in self.free}
        prov = [
            FREE if i in free_idx else (DEPENDENT if mask[i] else FORCED)
            for i in range(self.g3.size)
        ]
        free = [pt[: grid.dim] for pt in self.free]
        # Flat indices in solving order with how each value was found.
        self.trace["log"] = list(self.state.log)
        return ReconResult(
            grid=grid,
            directions=self.directions,
            values=list(self.state.values),
            provenance=prov,
            free_positions=free,
            ops=self.counter,
            stats=self.stats,
            trace=self.trace,
        )


def _sort_cost(n: int) -> int:
    return n * ceil(log2(n)) if n > 1 else 0


def reconstruct_3d(grid: Grid3, directions, linesums: LineSumTable, policy: FreeChoicePolicy | None = None) -> ReconResult:
    """A function with the given line sums, and the free positions used.

    Values outside the switching union agree with every solution; the free
    positions parameterize the rest.
    """
    return _Pipeline(grid, directions, linesums, policy).run()


def reconstruct_2d(grid: Grid2, directions, linesums: LineSumTable, policy: FreeChoicePolicy | None = None) -> ReconResult:
    """Planar reconstruction: weight-ordered corners, then peeling with free values."""
    pipe = _Pipeline(grid, directions, linesums, policy)
    m, n, _ = pipe.g3.shape
    st = pipe.state
    before = st.n_unknown
    scheduled = 0
    all_dirs = list(range(len(pipe.vecs)))
    orders = pipe._plane_orders(all_dirs)
    for pts in orders:
        for (p, q), hs in pts:
            i = p + m * q
            if st.values[i] is None and st.try_point(i, hs, "plane"):
                scheduled += 1
    pipe._record("corners", before, scheduled)
    pipe._solve_plane(0, [])
    st.peel()
    if st.n_unknown:
        raise StallError("reconstruction stalled", st.unknown_points())
    return pipe._result()


def reconstruct(grid: Grid, directions, linesums: LineSumTable, policy: FreeChoicePolicy | None = None) -> ReconResult:
    if isinstance(grid, Grid2):
        return reconstruct_2d(grid, directions, linesums, policy)
    return reconstruct_3d(grid, directions, linesums, policy)


def peel(grid: Grid, directions, linesums: LineSumTable, known: Mapping | None = None):
    """Resolve single-unknown lines until none is left.

    Returns ``(values, state)``: a mapping of every solved point (including
    ``known``) and the stalled engine for inspection.
    """
    g3 = grid.as_3d() if isinstance(grid, Grid2) else grid
    vecs = [direction_vector(d, grid.dim) + (0,) * (3 - grid.dim) for d in directions]
    sums, labels = _table_to_lists(grid, linesums, vecs, g3)
    state = PeelState(g3, vecs, sums, OpCounter(), labels)
    for pt, v in (known or {}).items():
        pt = tuple(pt) + (0,) * (3 - len(pt))
        state.assign(g3.flat(pt), to_value(v), "known")
    state.peel()
    values = {
        grid.point(i): v for i, v in enumerate(state.values) if v is not None
    }
    return values, state


@dataclass
class VerifyReport:
    max_abs: list
    mismatched: list

    @property
    def ok(self) -> bool:
        return not self.mismatched

    def __str__(self):
        lines = [f"direction #{h}: max |discrepancy| = {d}" for h, d in enumerate(self.max_abs)]
        lines.append(f"mismatched lines: {len(self.mismatched)}")
        return "\n".join(lines)


def verify(grid: Grid, directions, linesums: LineSumTable, values) -> VerifyReport:
    """Compare the line sums of ``values`` with ``linesums``."""
    got = forward_project(grid, values, directions)
    max_abs, bad = [], []
    for h in range(len(directions)):
        worst = 0
        want = linesums.sums[h]
        for base, s in got.sums[h].items():
            diff = abs(s - want.get(base, 0))
            if diff:
                bad.append(LineKey(h, base))
                worst = max(worst, diff)
        for base in want:
            if base not in got.sums[h]:
                bad.append(LineKey(h, base))
        max_abs.append(worst)
    return VerifyReport(max_abs, bad)


@dataclass
class ProvenanceReport:
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def provenance_audit(result: ReconResult, T) -> ProvenanceReport:
    """Forced points must lie outside ``T``; free and dependent ones inside."""
    inside = set(map(tuple, T.points if hasattr(T, "points") else T))
    bad = []
    for pt, label in zip(result.grid.points(), result.provenance):
        if (pt in inside) == (label == FORCED):
            bad.append((pt, label))
    return ProvenanceReport(bad)


def difference_support(a: ReconResult, b: ReconResult) -> list:
    return [pt for pt, x, y in zip(a.grid.points(), a.values, b.values) if x != y]
