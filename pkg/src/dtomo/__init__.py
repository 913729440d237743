"""Exact reconstruction of integer or rational functions on 2D and 3D
lattice grids from their line sums."""

from .counting import OpCounter
from .ghost import (
    GhostFunction,
    GhostResourceError,
    SwitchingUnion,
    elementary_ghost,
    solution_space_dim,
    switching_union,
)
from .hull import (
    BorderFan,
    FanOrderError,
    HullPolygon,
    HullPolytope,
    border_fan,
    exterior_points,
    face_audit,
    hull2,
    hull3,
    project_hull,
)
from .lattice import (
    DegenerateDirectionError,
    Direction2,
    Direction3,
    Grid2,
    Grid3,
    LineKey,
    LineSumTable,
    enumerate_lines,
    forward_project,
    is_valid,
    line_points,
    make_grid,
    normalize_direction,
    project_direction,
    validity,
)
from .order2d import (
    CORNERS,
    Corner,
    OutsideFanError,
    ReconOrder,
    corner_order,
    corner_transform,
    triangle_index,
    weight,
)
from .recon import (
    FreeChoicePolicy,
    InconsistentLineSumsError,
    PolicyError,
    ReconResult,
    StallError,
    peel,
    provenance_audit,
    reconstruct,
    reconstruct_2d,
    reconstruct_3d,
    verify,
)

__version__ = "0.1.0"
