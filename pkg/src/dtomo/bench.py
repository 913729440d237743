"""Operation-count sweeps for the 3D reconstruction."""

from __future__ import annotations

import random
import time
from dataclasses import asdict, dataclass

from .lattice import Grid3, forward_project, is_valid, normalize_direction
from .recon import reconstruct_3d

# Directions used by the default sweeps; prefixes of this list are valid on
# every cube of side 8 or more.
DEFAULT_POOL = [(1, 1, 2), (1, -2, 1), (1, 1, -2), (1, 0, 0), (0, 1, 1), (1, -1, -1)]
DEFAULT_SIZES = (8, 12, 16, 24, 32)
DEFAULT_DIR_COUNTS = (2, 3, 4, 6)


@dataclass
class BenchRecord:
    sweep: str
    m: int
    n: int
    o: int
    d: int
    add_sub: int
    mul_div: int
    comparisons: int
    assignments: int
    value_mul_div: int
    total: int
    ratio: float
    seconds: float
    verified: bool

    def as_dict(self) -> dict:
        return asdict(self)


def random_phantom(grid, seed: int, lo: int = -9, hi: int = 9) -> list:
    rng = random.Random(seed)
    return [rng.randint(lo, hi) for _ in range(grid.size)]


def bench_one(grid: Grid3, directions, seed: int = 0, sweep: str = "") -> BenchRecord:
    dirs = [normalize_direction(d) for d in directions]
    if not is_valid(grid, dirs):
        raise ValueError(f"directions {dirs} are not valid on {grid.shape}")
    phantom = random_phantom(grid, seed)
    sums = forward_project(grid, phantom, dirs)
    start = time.perf_counter()
    res = reconstruct_3d(grid, dirs, sums)
    elapsed = time.perf_counter() - start
    ops = res.ops
    verified = forward_project(grid, res.values, dirs) == sums
    return BenchRecord(
        sweep=sweep,
        m=grid.m,
        n=grid.n,
        o=grid.o,
        d=len(dirs),
        add_sub=ops.add_sub,
        mul_div=ops.mul_div,
        comparisons=ops.comparisons,
        assignments=ops.assignments,
        value_mul_div=ops.value_mul_div,
        total=ops.total,
        ratio=ops.total / (len(dirs) * grid.m * grid.n * grid.o),
        seconds=elapsed,
        verified=verified,
    )


def size_sweep(sizes=DEFAULT_SIZES, d: int = 4, pool=DEFAULT_POOL, seed: int = 0) -> list[BenchRecord]:
    return [bench_one(Grid3(s, s, s), pool[:d], seed, "size") for s in sizes]


def direction_sweep(counts=DEFAULT_DIR_COUNTS, side: int = 16, pool=DEFAULT_POOL, seed: int = 0) -> list[BenchRecord]:
    return [bench_one(Grid3(side, side, side), pool[:d], seed, "directions") for d in counts]


def spread(records) -> float:
    """Largest over smallest ratio in a sweep."""
    ratios = [r.ratio for r in records]
    return max(ratios) / min(ratios)


def format_table(records) -> str:
    head = f"{'sweep':<11}{'grid':>12}{'d':>3}{'add/sub':>10}{'mul/div':>8}{'cmp':>10}{'assign':>9}{'total':>10}{'ratio':>8}{'sec':>7}"
    rows = [head]
    for r in records:
        rows.append(
            f"{r.sweep:<11}{f'{r.m}x{r.n}x{r.o}':>12}{r.d:>3}{r.add_sub:>10}{r.mul_div:>8}"
            f"{r.comparisons:>10}{r.assignments:>9}{r.total:>10}{r.ratio:>8.3f}{r.seconds:>7.2f}"
        )
    return "\n".join(rows)
