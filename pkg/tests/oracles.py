"""Exact linear-algebra reference for small instances."""

from fractions import Fraction

from dtomo.lattice import enumerate_lines, line_points


def incidence_rows(grid, dirs):
    rows = []
    for d in dirs:
        for key in enumerate_lines(grid, d):
            rows.append({grid.flat(pt) for pt in line_points(grid, d, key.base)})
    return rows


def rref(rows, n):
    """Reduced row echelon form of 0/1 rows over the rationals; returns (pivot_cols, rows)."""
    mat = [[Fraction(1) if j in r else Fraction(0) for j in range(n)] for r in rows]
    pivots, out = [], []
    for col in range(n):
        pick = next((k for k, row in enumerate(mat) if row[col] != 0), None)
        if pick is None:
            continue
        row = mat.pop(pick)
        inv = 1 / row[col]
        row = [x * inv for x in row]
        for k, other in enumerate(mat):
            if other[col]:
                f = other[col]
                mat[k] = [a - f * b for a, b in zip(other, row)]
        for k, other in enumerate(out):
            if other[col]:
                f = other[col]
                out[k] = [a - f * b for a, b in zip(other, row)]
        pivots.append(col)
        out.append(row)
    return pivots, out


def nullity(grid, dirs) -> int:
    pivots, _ = rref(incidence_rows(grid, dirs), grid.size)
    return grid.size - len(pivots)


def determined_points(grid, dirs) -> set:
    """Points whose value is fixed by the line sums (unit vector in the row space)."""
    pivots, rows = rref(incidence_rows(grid, dirs), grid.size)
    out = set()
    for row, col in zip(rows, pivots):
        if sum(1 for x in row if x) == 1:
            out.add(grid.point(col))
    return out


def ray_ratio_oracle(p, q, fan):
    """|origin -> (p, q)| over |origin -> border chain along the same ray|, exactly."""
    if (p, q) == (0, 0):
        return Fraction(0)
    bp = fan.border_points
    for (X0, Y0), (X1, Y1) in zip(bp, bp[1:]):
        # Solve s*(p, q) = (X0, Y0) + u*(X1 - X0, Y1 - Y0).
        ex, ey = X1 - X0, Y1 - Y0
        det = p * (-ey) - q * (-ex)
        if det == 0:
            continue
        s = Fraction(X0 * (-ey) - Y0 * (-ex), det)
        u = Fraction(p * Y0 - q * X0, det)
        if 0 <= u <= 1 and s > 0:
            return 1 / s
    raise AssertionError("ray misses the chain")
