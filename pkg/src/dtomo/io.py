"""JSON file formats.

Every value is written as an integer ``[numerator, denominator]`` pair; no
floating point is ever persisted.  Files carry grid extents and the
direction list so they can be read without outside context.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from .lattice import (
    Direction2,
    Grid,
    LineSumTable,
    line_index,
    make_grid,
    normalize_direction,
    to_value,
)

INSTANCE_FORMAT = "dtomo-instance"
LINESUM_FORMAT = "dtomo-linesums"
VERSION = 1


class MalformedFileError(ValueError):
    """Input file does not follow the expected layout."""


def encode_value(v) -> list:
    f = Fraction(v)
    return [f.numerator, f.denominator]


def decode_value(raw):
    if isinstance(raw, bool):
        raise MalformedFileError(f"invalid value {raw!r}")
    if isinstance(raw, int):
        return raw
    if isinstance(raw, str):
        try:
            return to_value(Fraction(raw))
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedFileError(f"invalid value {raw!r}") from exc
    if (
        isinstance(raw, list)
        and len(raw) == 2
        and all(isinstance(x, int) and not isinstance(x, bool) for x in raw)
        and raw[1] != 0
    ):
        return to_value(Fraction(raw[0], raw[1]))
    raise MalformedFileError(f"invalid value {raw!r}; expected an integer or [num, den]")


def _read_json(path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedFileError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise MalformedFileError(f"{path}: top level must be an object")
    return data


def _grid_and_dirs(data: dict, where: str):
    try:
        grid = make_grid([int(x) for x in data["grid"]])
        raw = data["directions"]
        if not raw:
            raise MalformedFileError(f"{where}: direction list is empty")
        if any(len(d) != grid.dim for d in raw):
            raise MalformedFileError(f"{where}: directions must have {grid.dim} components")
        dirs = [normalize_direction(d) for d in raw]
    except MalformedFileError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedFileError(f"{where}: bad grid or directions ({exc})") from exc
    return grid, dirs


def _dir_json(d) -> list:
    return list(d.vector) if isinstance(d, Direction2) else [int(x) for x in d]


def _stamp(data: dict, timestamp: bool) -> dict:
    if timestamp:
        data["created"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return data


@dataclass
class Instance:
    grid: Grid
    directions: list
    values: list | None = None


def instance_to_json(inst: Instance, extra: dict | None = None, timestamp: bool = False) -> dict:
    data = {
        "format": INSTANCE_FORMAT,
        "version": VERSION,
        "grid": list(inst.grid.shape),
        "directions": [_dir_json(d) for d in inst.directions],
    }
    if inst.values is not None:
        data["values"] = [encode_value(v) for v in inst.values]
    if extra:
        data.update(extra)
    return _stamp(data, timestamp)


def instance_from_json(data: dict, where: str = "instance") -> Instance:
    grid, dirs = _grid_and_dirs(data, where)
    values = None
    if data.get("values") is not None:
        raw = data["values"]
        if not isinstance(raw, list) or len(raw) != grid.size:
            raise MalformedFileError(f"{where}: expected {grid.size} values")
        values = [decode_value(v) for v in raw]
    return Instance(grid, dirs, values)


def write_instance(path, inst: Instance, extra: dict | None = None, timestamp: bool = False):
    _write(path, instance_to_json(inst, extra, timestamp))


def read_instance(path) -> Instance:
    return instance_from_json(_read_json(path), str(path))


def linesums_to_json(table: LineSumTable, timestamp: bool = False) -> dict:
    lines = []
    for h in range(len(table.directions)):
        entries = sorted(table.sums[h].items(), key=lambda kv: table.grid.flat(kv[0]))
        lines.append([{"base": list(b), "sum": encode_value(s)} for b, s in entries])
    data = {
        "format": LINESUM_FORMAT,
        "version": VERSION,
        "grid": list(table.grid.shape),
        "directions": [_dir_json(d) for d in table.directions],
        "lines": lines,
    }
    return _stamp(data, timestamp)


def linesums_from_json(data: dict, where: str = "line sums") -> LineSumTable:
    grid, dirs = _grid_and_dirs(data, where)
    lines = data.get("lines")
    if not isinstance(lines, list) or len(lines) != len(dirs):
        raise MalformedFileError(f"{where}: need one line list per direction")
    sums = []
    for h, (d, entries) in enumerate(zip(dirs, lines)):
        _, bases = line_index(grid, d)
        expected = {grid.point(int(b)) for b in bases}
        table = {}
        try:
            for e in entries:
                base = tuple(int(x) for x in e["base"])
                if base in table:
                    raise MalformedFileError(f"{where}: direction #{h} repeats line {base}")
                table[base] = decode_value(e["sum"])
        except (KeyError, TypeError) as exc:
            raise MalformedFileError(f"{where}: direction #{h}: bad line entry ({exc})") from exc
        if set(table) != expected:
            missing = sorted(expected - set(table))[:5]
            extra = sorted(set(table) - expected)[:5]
            raise MalformedFileError(
                f"{where}: direction #{h}: lines do not match the grid (missing {missing}, unexpected {extra})"
            )
        sums.append(table)
    return LineSumTable(grid, dirs, sums)


def write_linesums(path, table: LineSumTable, timestamp: bool = False):
    _write(path, linesums_to_json(table, timestamp))


def read_linesums(path) -> LineSumTable:
    return linesums_from_json(_read_json(path), str(path))


def write_json(path, data: dict, timestamp: bool = False):
    _write(path, _stamp(dict(data), timestamp))


def dumps(data: dict) -> str:
    return json.dumps(data, indent=1, sort_keys=False, default=_default) + "\n"


def _default(obj):
    if isinstance(obj, Fraction):
        return encode_value(obj)
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _write(path, data: dict):
    text = dumps(data)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
