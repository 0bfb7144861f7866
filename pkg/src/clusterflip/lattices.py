"""Constructors for the lattices and boundary conditions used in experiments.

Two families: square/rectangular grids with a one-vertex-deep boundary ring
(corner cells omitted, so every boundary vertex has exactly one edge, to its
4-neighbor interior vertex), and quasi-uniform Delaunay triangulations of the
unit disk whose boundary vertices are equally spaced circle points.

Grid conventions: interior vertex (r, c) with r in [0, n1) and c in [0, n2)
has id r*n2 + c and embedding x = c - (n2-1)/2, y = (n1-1)/2 - r (unit
spacing, centered at the origin, row 0 on top).  Boundary ids follow in the
order left column, right column, top row, bottom row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import Delaunay

from .flip import InvolutionError, validate_involution
from .model import IsingGraph
from .rng import RngStream

BC_KINDS = ("sides-pm", "quadrant-pm", "arcs")


@dataclass(frozen=True)
class BoundarySpec:
    """Which boundary vertices carry +1.

    sides-pm: +1 on the two vertical sides, -1 on the two horizontal sides.
    quadrant-pm: +1 where x*y > 0 (quadrants 1 and 3), -1 elsewhere.
    arcs: +1 on the given half-open angular intervals [lo, hi), -1 on the rest.
    """

    kind: str
    arcs: tuple[tuple[float, float], ...] = field(default=())

    def __post_init__(self):
        if self.kind not in BC_KINDS:
            raise ValueError(f"unknown boundary kind {self.kind!r}")
        if self.kind == "arcs":
            if not self.arcs:
                raise ValueError("arcs boundary requires at least one interval")
            prev_hi = None
            total = 0.0
            for lo, hi in sorted(self.arcs):
                if not (0.0 <= lo < hi <= 2.0 * math.pi):
                    raise ValueError(f"arc [{lo}, {hi}) outside [0, 2*pi)")
                if prev_hi is not None and lo < prev_hi:
                    raise ValueError("arcs must be disjoint")
                prev_hi = hi
                total += hi - lo
            if not (0.0 < total < 2.0 * math.pi):
                raise ValueError("arc union must be neither empty nor the full circle")
        elif self.arcs:
            raise ValueError(f"arcs given but kind is {self.kind!r}")


def spin_at_point(bc: BoundarySpec, x: float, y: float) -> int:
    """Boundary spin the spec assigns to a point (by quadrant or by angle)."""
    if bc.kind == "sides-pm":
        raise ValueError("sides-pm assigns spins by side, not by position")
    if bc.kind == "quadrant-pm":
        return 1 if x * y > 0 else -1
    theta = math.atan2(y, x) % (2.0 * math.pi)
    return spin_at_angle(bc, theta)


def spin_at_angle(bc: BoundarySpec, theta: float) -> int:
    if bc.kind == "quadrant-pm":
        return 1 if math.sin(theta) * math.cos(theta) > 0 else -1
    if bc.kind != "arcs":
        raise ValueError("angle-based spins need quadrant-pm or arcs")
    theta = theta % (2.0 * math.pi)
    for lo, hi in bc.arcs:
        if lo <= theta < hi:
            return 1
    return -1


@dataclass(frozen=True)
class MeshParams:
    """Target mesh size and jitter seed for the disk triangulation."""

    h: float
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.h < 1.0):
            raise ValueError("mesh size h must satisfy 0 < h < 1")


def build_square_lattice(n1: int, n2: int, bc: BoundarySpec) -> IsingGraph:
    """n1 x n2 interior grid with a degree-1 boundary ring (corners dropped)."""
    if n1 < 1 or n2 < 1:
        raise ValueError("lattice sides must be positive")
    if bc.kind not in ("sides-pm", "quadrant-pm"):
        raise ValueError(f"square lattice does not support bc kind {bc.kind!r}")
    if bc.kind == "quadrant-pm" and (n1 % 2 or n2 % 2):
        raise ValueError("quadrant-pm needs even n1 and n2 (no vertex may sit on an axis)")

    n_interior = n1 * n2

    def iid(r: int, c: int) -> int:
        return r * n2 + c

    def xy(r: int, c: int) -> tuple[float, float]:
        return c - (n2 - 1) / 2.0, (n1 - 1) / 2.0 - r

    edges: list[tuple[int, int]] = []
    for r in range(n1):
        for c in range(n2):
            if c + 1 < n2:
                edges.append((iid(r, c), iid(r, c + 1)))
            if r + 1 < n1:
                edges.append((iid(r, c), iid(r + 1, c)))

    # boundary: left column, right column, top row, bottom row
    coords = [xy(r, c) for r in range(n1) for c in range(n2)]
    b_adjacent: list[int] = []
    b_coords: list[tuple[float, float]] = []
    b_side: list[str] = []
    for r in range(n1):
        x, y = xy(r, 0)
        b_adjacent.append(iid(r, 0))
        b_coords.append((x - 1.0, y))
        b_side.append("v")
    for r in range(n1):
        x, y = xy(r, n2 - 1)
        b_adjacent.append(iid(r, n2 - 1))
        b_coords.append((x + 1.0, y))
        b_side.append("v")
    for c in range(n2):
        x, y = xy(0, c)
        b_adjacent.append(iid(0, c))
        b_coords.append((x, y + 1.0))
        b_side.append("h")
    for c in range(n2):
        x, y = xy(n1 - 1, c)
        b_adjacent.append(iid(n1 - 1, c))
        b_coords.append((x, y - 1.0))
        b_side.append("h")

    spins = np.empty(len(b_adjacent), dtype=np.int8)
    for k, ((bx, by), side) in enumerate(zip(b_coords, b_side)):
        if bc.kind == "sides-pm":
            spins[k] = 1 if side == "v" else -1
        else:
            spins[k] = spin_at_point(bc, bx, by)

    for k, adj in enumerate(b_adjacent):
        edges.append((adj, n_interior + k))

    embedding = np.array(coords + b_coords, dtype=np.float64)
    return IsingGraph(n_interior, spins, np.array(edges, dtype=np.int64), embedding)


def build_disk_triangulation(params: MeshParams, bc: BoundarySpec) -> IsingGraph:
    """Jittered-grid Delaunay mesh of the unit disk.

    Boundary vertices are ceil(2*pi/h) equally spaced circle points with spins
    taken from the angular position; interior points come from a square grid
    of spacing h, jittered by up to 0.35h per coordinate, keeping radius
    < 1 - h/2.  Edges between two circle points are dropped so the boundary
    stays degree-limited to interior contacts.  Deterministic given the seed.
    """
    if bc.kind not in ("quadrant-pm", "arcs"):
        raise ValueError(f"disk triangulation does not support bc kind {bc.kind!r}")
    h = params.h
    rng = RngStream(params.seed, stream=0)

    n_ring = math.ceil(2.0 * math.pi / h)
    angles = 2.0 * math.pi * np.arange(n_ring) / n_ring
    ring = np.column_stack([np.cos(angles), np.sin(angles)])

    half = math.floor(1.0 / h)
    base = np.array(
        [(i * h, j * h) for i in range(-half, half + 1) for j in range(-half, half + 1)],
        dtype=np.float64,
    )
    jitter = (rng.uniforms(2 * len(base)).reshape(-1, 2) - 0.5) * (0.7 * h)
    pts = base + jitter
    keep = np.hypot(pts[:, 0], pts[:, 1]) < 1.0 - h / 2.0
    interior = pts[keep]
    if len(interior) == 0:
        raise ValueError(f"mesh size h={h} leaves no interior point in the disk")

    n_interior = len(interior)
    points = np.concatenate([interior, ring], axis=0)
    tri = Delaunay(points)
    pairs = set()
    for simplex in tri.simplices:
        for a in range(3):
            u, v = int(simplex[a]), int(simplex[(a + 1) % 3])
            if u >= n_interior and v >= n_interior:
                continue  # no boundary-boundary edges
            pairs.add((min(u, v), max(u, v)))
    edges = np.array(sorted(pairs), dtype=np.int64)

    spins = np.array([spin_at_angle(bc, float(a)) for a in angles], dtype=np.int8)
    return IsingGraph(n_interior, spins, edges, points)


_REFLECTIONS = {
    # exact coordinate maps; "diagonal" reflects about the line y = -x, which
    # is the index transpose (r, c) -> (c, r) in grid coordinates
    "diagonal": lambda x, y: (-y, -x),
    "x-axis": lambda x, y: (x, -y),
    "y-axis": lambda x, y: (-x, y),
}


def exact_involution_for(g: IsingGraph, kind: str) -> np.ndarray:
    """Vertex permutation realizing a lattice reflection; validated before return.

    diagonal fits sides-pm with n1 == n2; x-axis / y-axis fit quadrant-pm.
    Raises InvolutionError when the lattice has no vertex at a reflected
    position or the reflection violates an involution axiom.
    """
    if kind not in _REFLECTIONS:
        raise ValueError(f"unknown involution kind {kind!r}")
    if g.embedding is None:
        raise InvolutionError("graph has no embedding to reflect")
    refl = _REFLECTIONS[kind]
    # grid coordinates are half-integers, so reflected positions match exactly
    index = {(float(x), float(y)): vid for vid, (x, y) in enumerate(g.embedding)}
    perm = np.empty(g.n_vertices, dtype=np.int64)
    for vid in range(g.n_vertices):
        x, y = g.embedding[vid]
        target = refl(float(x), float(y))
        if target not in index:
            raise InvolutionError(
                f"{kind} reflection maps vertex {vid} to {target}, where no vertex exists"
            )
        perm[vid] = index[target]
    violations = validate_involution(g, perm)
    if violations:
        raise InvolutionError(
            f"{kind} reflection is not a valid involution here: " + "; ".join(violations[:3])
        )
    return perm
