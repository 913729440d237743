"""Convex hull of the switching union as a zonotope, plus its shadows.

The hull is the Minkowski sum of the direction segments and three
axis-parallel segments spanning the admissible shifts, placed at the ghost
anchor.  Everything is exact integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from math import gcd

from .ghost import ghost_anchor, shift_box
from .lattice import Grid, component_sums, direction_vector, is_valid

AXES = ("x", "y", "z")


def _sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def _add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def _cross(u, v):
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def _cross2(u, v):
    return u[0] * v[1] - u[1] * v[0]


def _primitive(v):
    g = 0
    for x in v:
        g = gcd(g, x)
    return tuple(x // g for x in v) if g else tuple(v)


def _lex_positive(v) -> bool:
    for x in v:
        if x:
            return x > 0
    return False


def _canonical_generators(anchor, gens):
    """Orient every segment lex-positively and merge parallel ones.

    ``gens`` is a list of ``(vector, label)``.  Returns the shifted anchor and
    a list of ``(vector, labels)`` with pairwise non-parallel vectors.
    """
    merged: dict = {}
    order = []
    for vec, label in gens:
        if not any(vec):
            continue
        if not _lex_positive(vec):
            anchor = _add(anchor, vec)
            vec = tuple(-x for x in vec)
        key = _primitive(vec)
        if key not in merged:
            merged[key] = [vec, [label]]
            order.append(key)
        else:
            merged[key][0] = _add(merged[key][0], vec)
            merged[key][1].append(label)
    return anchor, [(merged[k][0], tuple(merged[k][1])) for k in order]


@dataclass(frozen=True)
class Face:
    """Parallelogram ``base, base+e1, base+e1+e2, base+e2``."""

    vertices: tuple
    edges: tuple
    labels: tuple
    normal: tuple


@dataclass
class HullPolytope:
    vertices: list
    faces: list
    empty: bool = False
    anchor: tuple | None = None
    generators: list = field(default_factory=list)
    coplanar_facets: int = 0

    def to_json(self) -> dict:
        return {
            "empty": self.empty,
            "vertices": [list(v) for v in self.vertices],
            "faces": [
                {
                    "vertices": [list(v) for v in f.vertices],
                    "edges": [list(e) for e in f.edges],
                    "labels": [list(lab) for lab in f.labels],
                }
                for f in self.faces
            ],
        }


@dataclass
class HullPolygon:
    """Convex lattice polygon, vertices counterclockwise from the lowest-leftmost."""

    vertices: list
    empty: bool = False

    def contains(self, pt) -> bool:
        vs = self.vertices
        if self.empty or not vs:
            return False
        if len(vs) == 1:
            return tuple(pt) == tuple(vs[0])
        if len(vs) == 2:
            a, b = vs
            if _cross2(_sub(b, a), _sub(pt, a)) != 0:
                return False
            return min(a[0], b[0]) <= pt[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= pt[1] <= max(a[1], b[1])
        k = len(vs)
        return all(_cross2(_sub(vs[(i + 1) % k], vs[i]), _sub(pt, vs[i])) >= 0 for i in range(k))

    def to_json(self) -> dict:
        return {"empty": self.empty, "vertices": [list(v) for v in self.vertices]}


def zonogon(anchor, gens) -> list:
    """Counterclockwise vertex list of a planar zonotope.

    ``gens`` are 2D integer vectors; parallel ones are merged.
    """
    anchor, cg = _canonical_generators(tuple(anchor), [(tuple(g), None) for g in gens])
    vecs = [v for v, _ in cg]
    if not vecs:
        return [anchor]
    # Lex-positive in (x, y) keeps vectors in the half-plane x > 0 or (x == 0, y > 0);
    # sorting by angle then runs clockwise-to-counterclockwise from -pi/2.
    vecs.sort(key=lambda v: Fraction(v[1], v[0]) if v[0] else Fraction(10**18))
    if len(vecs) == 1:
        return sorted([anchor, _add(anchor, vecs[0])])
    pts = [anchor]
    for v in vecs:
        pts.append(_add(pts[-1], v))
    for v in vecs[:-1]:
        pts.append(_add(pts[-1], tuple(-x for x in v)))
    start = min(range(len(pts)), key=lambda i: (pts[i][1], pts[i][0]))
    return pts[start:] + pts[:start]


def _facet_tiles(base, members, normal):
    """Tile the zonogon ``base + sum [0, v]`` lying in a plane into parallelograms."""
    # Dropping the dominant normal coordinate is injective on the plane.
    drop = max(range(3), key=lambda i: abs(normal[i]))
    keep = [i for i in range(3) if i != drop]

    def proj(v):
        return (v[keep[0]], v[keep[1]])

    oriented = []
    for vec, labels in members:
        p = proj(vec)
        if p[1] < 0 or (p[1] == 0 and p[0] < 0):
            base = _add(base, vec)
            vec = tuple(-x for x in vec)
            p = (-p[0], -p[1])
        oriented.append((vec, labels, p))
    # By angle within the half-plane.
    oriented.sort(key=cmp_to_key(lambda u, w: -_cross2(u[2], w[2])))
    tiles = []
    k = len(oriented)
    for i in range(k):
        for j in range(i + 1, k):
            start = base
            for l in range(i + 1, j):
                start = _add(start, oriented[l][0])
            ei, ej = oriented[i][0], oriented[j][0]
            verts = (start, _add(start, ei), _add(_add(start, ei), ej), _add(start, ej))
            tiles.append(Face(verts, (ei, ej), (oriented[i][1], oriented[j][1]), normal))
    # Facet outline: base + partial sums forward then back.
    outline = [base]
    for vec, _, _ in oriented:
        outline.append(_add(outline[-1], vec))
    for vec, _, _ in oriented[:-1]:
        outline.append(_sub(outline[-1], vec))
    return tiles, outline


def zonotope3(anchor, gens) -> HullPolytope:
    """Vertices and parallelogram faces of a 3D zonotope.

    Facets spanned by three or more coplanar generator classes are zonogons;
    they are reported as their rhombic tiling so every face is a
    parallelogram, and counted in ``coplanar_facets``.
    """
    anchor, cg = _canonical_generators(tuple(anchor), gens)
    normals = []
    seen = set()
    for i in range(len(cg)):
        for j in range(i + 1, len(cg)):
            nrm = _primitive(_cross(cg[i][0], cg[j][0]))
            if not _lex_positive(nrm):
                nrm = tuple(-x for x in nrm)
            if nrm not in seen:
                seen.add(nrm)
                normals.append(nrm)
    if not normals or not any(_dot(nrm, v) for nrm in normals for v, _ in cg):
        return _flat_zonotope(anchor, cg)
    faces, verts, coplanar = [], set(), 0
    for nrm in normals:
        members = [(v, lab) for v, lab in cg if _dot(nrm, v) == 0]
        if len(members) > 2:
            coplanar += 2
        for sign in (1, -1):
            out = tuple(sign * x for x in nrm)
            base = anchor
            for v, _ in cg:
                if _dot(out, v) > 0:
                    base = _add(base, v)
            tiles, outline = _facet_tiles(base, members, out)
            faces.extend(tiles)
            verts.update(outline)
    return HullPolytope(
        vertices=sorted(verts, key=lambda v: v[::-1]),
        faces=faces,
        anchor=anchor,
        generators=cg,
        coplanar_facets=coplanar,
    )


def _flat_zonotope(anchor, cg) -> HullPolytope:
    if not cg:
        return HullPolytope([anchor], [], anchor=anchor, generators=cg)
    if len(cg) == 1:
        return HullPolytope(sorted([anchor, _add(anchor, cg[0][0])], key=lambda v: v[::-1]), [], anchor=anchor, generators=cg)
    nrm = _primitive(_cross(cg[0][0], cg[1][0]))
    _, outline = _facet_tiles(anchor, cg, nrm)
    return HullPolytope(sorted(set(outline), key=lambda v: v[::-1]), [], anchor=anchor, generators=cg)


def hull_generators(grid: Grid, directions):
    """Anchor and labelled generators of the hull of the switching union."""
    dim = grid.dim
    box = shift_box(grid, directions)
    gens = [(direction_vector(d, dim), h) for h, d in enumerate(directions)]
    for i, k in enumerate(box):
        if k > 1:
            vec = tuple(k - 1 if j == i else 0 for j in range(dim))
            gens.append((vec, AXES[i]))
    return ghost_anchor(directions, dim), gens


def hull3(grid: Grid, directions) -> HullPolytope:
    """Convex hull of the switching union of a 3D instance."""
    if not is_valid(grid, directions):
        return HullPolytope([], [], empty=True)
    anchor, gens = hull_generators(grid, directions)
    return zonotope3(anchor, gens)


def hull2(grid: Grid, directions) -> HullPolygon:
    """Convex hull of the switching union of a 2D instance."""
    if not is_valid(grid, directions):
        return HullPolygon([], empty=True)
    anchor, gens = hull_generators(grid, directions)
    return HullPolygon(zonogon(anchor, [g for g, _ in gens]))


def project_hull(C: HullPolytope, axis: str) -> HullPolygon:
    """Shadow of the hull along ``axis`` on the remaining coordinate plane."""
    if C.empty:
        return HullPolygon([], empty=True)
    keep = [i for i in range(3) if AXES[i] != axis]
    anchor = tuple(C.anchor[i] for i in keep)
    gens = [tuple(v[i] for i in keep) for v, _ in C.generators]
    return HullPolygon(zonogon(anchor, gens))


def exterior_points(poly: HullPolygon, extents) -> list:
    """Lattice points of the ``extents`` page not in the closed polygon, sorted."""
    M, N = extents
    return [(x, y) for x in range(M) for y in range(N) if not poly.contains((x, y))]


@dataclass(frozen=True)
class BorderFan:
    """Border chain and triangle fan for directions with ``a > 0, b < 0``.

    ``directions`` are the (possibly merged) chain segments, ``members[H-1]``
    the indices of the input directions merged into segment ``H``.
    """

    directions: tuple
    members: tuple
    border_points: tuple

    @property
    def k(self) -> int:
        return len(self.directions)

    @property
    def triangles(self) -> list:
        bp = self.border_points
        return [((0, 0), bp[h - 1], bp[h]) for h in range(1, len(bp))]

    @property
    def denominators(self) -> tuple:
        """Weight denominators ``a_H * Q_H + |b_H| * P_H`` per segment."""
        out = []
        for h, (a, b) in enumerate(self.directions, start=1):
            P, Q = self.border_points[h]
            out.append(a * Q + (-b) * P)
        return tuple(out)


class FanOrderError(ValueError):
    """Fan directions have the wrong signs or are not ordered by slope."""


def border_fan(directions, members=None) -> BorderFan:
    """Border points of directions ordered by nondecreasing ``|b|/a``.

    Consecutive directions with equal ratio are merged by vector addition.
    """
    dirs = [direction_vector(d, 2) for d in directions]
    if members is None:
        members = [(i,) for i in range(len(dirs))]
    merged, merged_members = [], []
    for (a, b), mem in zip(dirs, members):
        if a <= 0 or b >= 0:
            raise FanOrderError(f"fan direction {(a, b)} needs a > 0 and b < 0")
        if merged:
            pa, pb = merged[-1]
            # |b|/a compared with the previous |pb|/pa.
            c = (-b) * pa - (-pb) * a
            if c < 0:
                raise FanOrderError("fan directions must be ordered by nondecreasing |b|/a")
            if c == 0:
                merged[-1] = (pa + a, pb + b)
                merged_members[-1] = merged_members[-1] + tuple(mem)
                continue
        merged.append((a, b))
        merged_members.append(tuple(mem))
    P = sum(a for a, _ in merged)
    Q = 0
    pts = [(P, Q)]
    for a, b in merged:
        P, Q = P - a, Q - b
        pts.append((P, Q))
    return BorderFan(tuple(merged), tuple(merged_members), tuple(pts))


@dataclass
class FaceAuditReport:
    ok: bool
    n_faces: int
    coplanar_facets: int
    violations: list

    def __str__(self):
        status = "pass" if self.ok else "FAIL"
        return f"face audit {status}: {self.n_faces} faces, {len(self.violations)} violations"


def face_audit(C: HullPolytope, directions) -> FaceAuditReport:
    """Check that every face is a supporting parallelogram with allowed edges."""
    allowed = set()
    for d in directions:
        allowed.add(_primitive(direction_vector(d, 3)))
    for i in range(3):
        allowed.add(tuple(1 if j == i else 0 for j in range(3)))
    allowed |= {tuple(-x for x in v) for v in allowed}
    violations = []
    for f in C.faces:
        v0, v1, v2, v3 = f.vertices
        e1, e2 = _sub(v1, v0), _sub(v3, v0)
        if _sub(v2, v1) != e2 or _sub(v3, v2) != tuple(-x for x in e1):
            violations.append((f, "not a parallelogram"))
            continue
        for e in (e1, e2):
            if _primitive(e) not in allowed:
                violations.append((f, f"edge {e} not in +-D or axis-parallel"))
        nrm = _cross(e1, e2)
        if not any(nrm):
            violations.append((f, "degenerate face"))
            continue
        level = _dot(nrm, v0)
        side = {(_dot(nrm, v) > level) - (_dot(nrm, v) < level) for v in C.vertices}
        if side >= {1, -1}:
            violations.append((f, "face plane cuts the polytope"))
    return FaceAuditReport(not violations, len(C.faces), C.coplanar_facets, violations)
