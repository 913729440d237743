"""Command line interface: ``dtomo <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 malformed input, 3 inconsistent
line sums (or a failed verification).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench as benchmod
from .ghost import GhostResourceError, elementary_ghost, switching_union
from .hull import AXES, exterior_points, hull2, hull3, project_hull
from .io import (
    Instance,
    MalformedFileError,
    decode_value,
    instance_to_json,
    read_instance,
    read_linesums,
    write_json,
    write_linesums,
)
from .lattice import DegenerateDirectionError, Direction2, Grid2, forward_project, make_grid, normalize_direction, validity
from .order2d import Corner, corner_transform, weight_map
from .recon import (
    FreeChoicePolicy,
    InconsistentLineSumsError,
    PolicyError,
    StallError,
    reconstruct,
    verify,
)

EXIT_OK, EXIT_USAGE, EXIT_MALFORMED, EXIT_INCONSISTENT = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _ints(text: str, what: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x != ""]
    except ValueError:
        raise CliError(f"cannot parse {what} {text!r}", EXIT_USAGE) from None


def parse_grid(text: str):
    ext = _ints(text, "grid")
    if len(ext) not in (2, 3) or min(ext) < 1:
        raise CliError(f"--grid needs 2 or 3 positive extents, got {text!r}", EXIT_USAGE)
    return make_grid(ext)


def parse_dirs(text: str, normalize: bool = True) -> list:
    """Parse ``"a,b,c;a,b,c"``.  Without ``normalize`` 2D vectors are kept as given."""
    parts = [s for s in text.split(";") if s.strip()]
    if not parts:
        raise CliError("--dirs is empty", EXIT_USAGE)
    out = []
    for part in parts:
        comps = _ints(part, "direction")
        if not normalize and len(comps) == 2:
            if comps == [0, 0]:
                raise CliError("degenerate direction (0, 0)", EXIT_USAGE)
            out.append(Direction2(comps[0], comps[1], False))
            continue
        try:
            out.append(normalize_direction(comps))
        except (DegenerateDirectionError, ValueError) as exc:
            raise CliError(str(exc), EXIT_USAGE) from None
    if len({_dir_dim(d) for d in out}) != 1:
        raise CliError("all directions must have the same number of components", EXIT_USAGE)
    return out


def _dir_dim(d) -> int:
    return 2 if hasattr(d, "vector") else 3


def _geometry(args):
    """Grid and directions from ``--in`` or from ``--grid``/``--dirs``."""
    if args.inp:
        inst = read_instance(args.inp)
        return inst.grid, inst.directions, inst
    if not (args.grid and args.dirs):
        raise CliError("give --in, or both --grid and --dirs", EXIT_USAGE)
    grid, dirs = parse_grid(args.grid), parse_dirs(args.dirs)
    if _dir_dim(dirs[0]) != grid.dim:
        raise CliError("direction and grid dimensions differ", EXIT_USAGE)
    return grid, dirs, None


def _pt(p) -> list:
    return [int(x) for x in p]


# -- subcommands --------------------------------------------------------------


def cmd_project(args) -> int:
    grid, dirs, inst = _geometry(args)
    if inst is None or inst.values is None:
        raise CliError("project needs an instance file with values (--in)", EXIT_USAGE)
    table = forward_project(grid, inst.values, dirs)
    write_linesums(args.out, table, timestamp=not args.no_timestamp)
    return EXIT_OK


def _read_free_values(path: str) -> list:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MalformedFileError(f"{path}: not valid JSON ({exc})") from exc
    if isinstance(data, dict):
        data = data.get("values")
    if not isinstance(data, list):
        raise MalformedFileError(f"{path}: expected a list of values")
    return [decode_value(v) for v in data]


def cmd_reconstruct(args) -> int:
    if not args.inp:
        raise CliError("reconstruct needs a line-sum file (--in)", EXIT_USAGE)
    table = read_linesums(args.inp)
    policy = FreeChoicePolicy(values=_read_free_values(args.free_values)) if args.free_values else None
    try:
        res = reconstruct(table.grid, table.directions, table, policy)
    except PolicyError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    except InconsistentLineSumsError as exc:
        raise CliError(str(exc) + _total_diagnosis(table), EXIT_INCONSISTENT) from None
    except StallError as exc:
        raise CliError(f"reconstruction stalled at {len(exc.unknown)} points", EXIT_INCONSISTENT) from None
    extra = {
        "free_choices": res.n_free,
        "free_positions": [_pt(p) for p in res.free_positions],
        "provenance": res.provenance,
        "ops": res.ops.as_dict(),
    }
    write_json(
        args.out,
        instance_to_json(Instance(table.grid, table.directions, res.values), extra),
        timestamp=not args.no_timestamp,
    )
    report = sys.stdout if args.out not in (None, "-") else sys.stderr
    print(f"grid: {'x'.join(map(str, table.grid.shape))}  directions: {len(table.directions)}", file=report)
    print(f"free choices: {res.n_free}", file=report)
    if res.free_positions:
        print("free positions: " + " ".join(str(tuple(p)) for p in res.free_positions), file=report)
    ops = res.ops
    print(
        f"ops: add/sub {ops.add_sub}  mul/div {ops.mul_div}  comparisons {ops.comparisons}"
        f"  assignments {ops.assignments}  total {ops.total}",
        file=report,
    )
    return EXIT_OK


def _total_diagnosis(table) -> str:
    """Directions whose line sums add up to a different total than most others."""
    totals = [table.total(h) for h in range(len(table.directions))]
    common = max(set(totals), key=totals.count)
    if totals.count(common) * 2 <= len(totals):
        return ""
    odd = [h for h, t in enumerate(totals) if t != common]
    return "".join(
        f"\ndirection #{h} sums to {totals[h]}, the other directions to {common}" for h in odd
    )


def cmd_verify(args) -> int:
    if not (args.inp and args.values):
        raise CliError("verify needs --in LINESUMS and --values INSTANCE", EXIT_USAGE)
    table = read_linesums(args.inp)
    inst = read_instance(args.values)
    if inst.values is None:
        raise CliError(f"{args.values} has no values", EXIT_USAGE)
    if inst.grid != table.grid:
        raise CliError("grid of --values differs from the line-sum file", EXIT_MALFORMED)
    rep = verify(table.grid, table.directions, table, inst.values)
    for h, d in enumerate(rep.max_abs):
        print(f"direction #{h} {tuple(_dir_list(table.directions[h]))}: max |discrepancy| = {d}")
    print(f"mismatched lines: {len(rep.mismatched)}")
    for key in rep.mismatched[:20]:
        print(f"  direction #{key.h} line through {tuple(key.base)}")
    return EXIT_OK if rep.ok else EXIT_INCONSISTENT


def _dir_list(d) -> list:
    return list(d.vector) if hasattr(d, "vector") else [int(x) for x in d]


def cmd_ghost(args) -> int:
    if not args.dirs:
        raise CliError("ghost needs --dirs", EXIT_USAGE)
    dirs = parse_dirs(args.dirs)
    dim = _dir_dim(dirs[0])
    try:
        g = elementary_ghost(dirs, dim)
    except GhostResourceError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    data = {
        "directions": [_dir_list(d) for d in dirs],
        "anchor": _pt(g.anchor),
        "support": [{"point": _pt(p), "value": g.values[p]} for p in sorted(g.values, key=lambda p: p[::-1])],
    }
    if args.grid:
        grid = parse_grid(args.grid)
        if grid.dim != dim:
            raise CliError("direction and grid dimensions differ", EXIT_USAGE)
        T = switching_union(grid, dirs)
        data["grid"] = list(grid.shape)
        data["switching_union"] = [_pt(p) for p in T.points]
    write_json(args.out, data, timestamp=not args.no_timestamp)
    return EXIT_OK


def cmd_hull(args) -> int:
    grid, dirs, _ = _geometry(args)
    data = {"grid": list(grid.shape), "directions": [_dir_list(d) for d in dirs], "validity": validity(grid, dirs)}
    if isinstance(grid, Grid2):
        data["hull"] = hull2(grid, dirs).to_json()
    else:
        C = hull3(grid, dirs)
        data["hull"] = C.to_json()
        proj = {}
        for i, axis in enumerate(AXES):
            poly = project_hull(C, axis)
            page = tuple(e for j, e in enumerate(grid.shape) if j != i)
            proj[axis] = {
                "vertices": [_pt(v) for v in poly.vertices],
                "exterior": [_pt(p) for p in exterior_points(poly, page)] if not poly.empty else [],
            }
        data["projections"] = proj
    write_json(args.out, data, timestamp=not args.no_timestamp)
    return EXIT_OK


def cmd_weights(args) -> int:
    if not args.dirs:
        raise CliError("weights needs --dirs", EXIT_USAGE)
    dirs = parse_dirs(args.dirs, normalize=False)
    if _dir_dim(dirs[0]) != 2:
        raise CliError("weights takes 2D directions", EXIT_USAGE)
    corner = Corner(*_ints(args.corner, "corner"))
    if any(c not in (0, 1) for c in corner):
        raise CliError("--corner must be two flags from {0, 1}", EXIT_USAGE)
    if args.grid:
        grid = parse_grid(args.grid)
        if grid.dim != 2:
            raise CliError("weights takes a 2D grid", EXIT_USAGE)
        extents = grid.shape
    else:
        extents = _default_page(dirs, corner)
    wm = weight_map(extents, dirs, corner)
    fan = wm["fan"]
    data = {
        "grid": list(extents),
        "corner": list(corner),
        "fan": [list(v) for v in fan.directions],
        "border_points": [list(p) for p in fan.border_points],
        "pixels": wm["pixels"],
    }
    write_json(args.out, data, timestamp=not args.no_timestamp)
    return EXIT_OK


def _default_page(dirs, corner) -> tuple:
    """Smallest page containing the border chain."""
    fan, _ = corner_transform(dirs, corner)
    if fan.k == 0:
        raise CliError("no direction enters the page from this corner; give --grid", EXIT_USAGE)
    return (fan.border_points[0][0] + 1, fan.border_points[-1][1] + 1)


def cmd_bench(args) -> int:
    sizes = _ints(args.sizes, "sizes")
    counts = _ints(args.counts, "direction counts")
    pool = parse_dirs(args.dirs) if args.dirs else benchmod.DEFAULT_POOL
    if max(counts) > len(pool):
        raise CliError(f"direction pool has only {len(pool)} entries", EXIT_USAGE)
    try:
        a = benchmod.size_sweep(sizes, args.d, pool, args.seed)
        b = benchmod.direction_sweep(counts, args.side, pool, args.seed)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    print(benchmod.format_table(a + b))
    print(f"size sweep ratio spread: {benchmod.spread(a):.3f}")
    print(f"direction sweep ratio spread: {benchmod.spread(b):.3f}")
    if args.out:
        write_json(
            args.out,
            {"records": [r.as_dict() for r in a + b]},
            timestamp=not args.no_timestamp,
        )
    return EXIT_OK


# -- entry point --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dtomo", description="Exact reconstruction of lattice functions from line sums.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, geometry=True):
        if geometry:
            p.add_argument("--grid", help="grid extents m,n[,o]")
            p.add_argument("--dirs", help='directions "a,b,c;a,b,c;..."')
        p.add_argument("--in", dest="inp", help="input file")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--no-timestamp", action="store_true", help="omit the creation time from output")

    p = sub.add_parser("project", help="line sums of an instance with values")
    common(p)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("reconstruct", help="reconstruct values from a line-sum file")
    common(p, geometry=False)
    p.add_argument("--free-values", help="JSON list of values for the free positions, in order")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("verify", help="compare values against a line-sum file")
    common(p, geometry=False)
    p.add_argument("--values", help="instance file with the values to check")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("ghost", help="elementary ghost of a direction set")
    common(p)
    p.set_defaults(func=cmd_ghost)

    p = sub.add_parser("hull", help="hull of the switching union and its projections")
    common(p)
    p.set_defaults(func=cmd_hull)

    p = sub.add_parser("weights", help="per-pixel weights and order numbers for 2D directions")
    common(p)
    p.add_argument("--corner", default="0,0", help="corner flags sx,sy (default 0,0)")
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("bench", help="operation counts over cube-size and direction-count sweeps")
    common(p)
    p.add_argument("--sizes", default=",".join(map(str, benchmod.DEFAULT_SIZES)))
    p.add_argument("--counts", default=",".join(map(str, benchmod.DEFAULT_DIR_COUNTS)))
    p.add_argument("--d", type=int, default=4, help="direction count in the size sweep")
    p.add_argument("--side", type=int, default=16, help="cube side in the direction sweep")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"dtomo: {exc}", file=sys.stderr)
        return exc.code
    except FileNotFoundError as exc:
        print(f"dtomo: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except (MalformedFileError, ValueError) as exc:
        print(f"dtomo: malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
