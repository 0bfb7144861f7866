"""Ising model on a graph with fixed ±1 boundary spins.

Vertices carry dense integer ids: interior ids 0..n_interior-1, boundary ids
n_interior..n_vertices-1.  Edges never join two boundary vertices.  The
alignment sum H(s) = sum over interior edges of s_i*s_j plus sum over boundary
edges of s_i*f_b is kept as an exact integer; the inverse temperature only
multiplies it at the point of exponentiation.

Graphs are immutable after construction and safe to share across workers.
Spin configurations are plain int8 arrays of ±1 of length n_interior.
"""

from __future__ import annotations

import numpy as np


class GraphFormatError(ValueError):
    """Raised on malformed graph construction input or graph files."""


class IsingGraph:
    """Immutable graph with interior spins, boundary spins, optional embedding.

    Edges are stored with the interior-interior block first, then the
    interior-boundary block, each preserving the order given at construction.
    """

    def __init__(
        self,
        n_interior: int,
        boundary_spin: np.ndarray,
        edges: np.ndarray,
        embedding: np.ndarray | None = None,
    ):
        n_interior = int(n_interior)
        if n_interior < 0:
            raise GraphFormatError("n_interior must be nonnegative")
        boundary_spin = np.asarray(boundary_spin, dtype=np.int8)
        if boundary_spin.ndim != 1:
            raise GraphFormatError("boundary_spin must be a 1-d sequence")
        if boundary_spin.size and not np.all(np.abs(boundary_spin) == 1):
            raise GraphFormatError("boundary spins must be +1 or -1")

        n_boundary = boundary_spin.size
        n_vertices = n_interior + n_boundary
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)

        if edges.size:
            if edges.min() < 0 or edges.max() >= n_vertices:
                raise GraphFormatError("edge endpoint out of range")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise GraphFormatError("self-loops are not allowed")
            both_boundary = (edges[:, 0] >= n_interior) & (edges[:, 1] >= n_interior)
            if np.any(both_boundary):
                bad = edges[both_boundary][0]
                raise GraphFormatError(f"edge {tuple(bad)} joins two boundary vertices")
            canon = np.sort(edges, axis=1)
            if len({(int(a), int(b)) for a, b in canon}) != len(edges):
                raise GraphFormatError("duplicate edges are not allowed")

        # normalize order: interior-interior block, then interior-boundary with
        # the interior endpoint first
        is_ib = (edges[:, 0] >= n_interior) | (edges[:, 1] >= n_interior) if edges.size else np.zeros(0, bool)
        ii = edges[~is_ib] if edges.size else edges
        ib = edges[is_ib] if edges.size else edges
        if ib.size:
            swap = ib[:, 0] >= n_interior
            ib = ib.copy()
            ib[swap] = ib[swap][:, ::-1]
        ordered = np.concatenate([ii, ib], axis=0) if edges.size else edges

        if embedding is not None:
            embedding = np.asarray(embedding, dtype=np.float64).reshape(n_vertices, 2)
            embedding.setflags(write=False)

        self.n_interior = n_interior
        self.n_boundary = n_boundary
        self.n_vertices = n_vertices
        self.n_interior_edges = len(ii)
        self.edges = ordered
        self.boundary_spin = boundary_spin
        self.embedding = embedding

        # flat endpoint arrays for the sampler hot path
        self.edges_u = np.ascontiguousarray(ordered[:, 0])
        self.edges_v = np.ascontiguousarray(ordered[:, 1])

        for a in (self.edges, self.boundary_spin, self.edges_u, self.edges_v):
            a.setflags(write=False)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def full_spin_vector(self, s: np.ndarray) -> np.ndarray:
        """Length-n_vertices int8 vector: interior spins then boundary spins."""
        s = validate_spins(self, s)
        sv = np.empty(self.n_vertices, dtype=np.int8)
        sv[: self.n_interior] = s
        sv[self.n_interior :] = self.boundary_spin
        return sv

    def __eq__(self, other) -> bool:
        if not isinstance(other, IsingGraph):
            return NotImplemented
        same_embed = (self.embedding is None) == (other.embedding is None) and (
            self.embedding is None or np.array_equal(self.embedding, other.embedding)
        )
        return (
            self.n_interior == other.n_interior
            and np.array_equal(self.boundary_spin, other.boundary_spin)
            and np.array_equal(self.edges, other.edges)
            and same_embed
        )

    def __repr__(self) -> str:
        return (
            f"IsingGraph(|I|={self.n_interior}, |B|={self.n_boundary}, "
            f"|E|={self.n_edges}, embedded={self.embedding is not None})"
        )


def validate_spins(g: IsingGraph, s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=np.int8)
    if s.shape != (g.n_interior,):
        raise ValueError(f"spin config has length {s.size}, expected {g.n_interior}")
    if s.size and not np.all(np.abs(s) == 1):
        raise ValueError("spins must be +1 or -1")
    return s


def alignment_sum(g: IsingGraph, s: np.ndarray) -> int:
    """Exact integer H(s): aligned edges count +1, misaligned -1.

    The unnormalized Gibbs weight of s is exp(beta * alignment_sum(g, s)).
    """
    sv = g.full_spin_vector(s)
    return int(np.sum(sv[g.edges_u].astype(np.int64) * sv[g.edges_v]))


def alignment_delta_under_flip(g: IsingGraph, s: np.ndarray, m: np.ndarray) -> int:
    """H(t) - H(s) for the proposal t_i = -s_{m(i)}.

    m only needs to be a bijection on interior ids here; boundary entries of a
    full vertex permutation are ignored.
    """
    s = validate_spins(g, s)
    m_int = _interior_map(g, m)
    t = -s[m_int]
    tv = np.empty(g.n_vertices, dtype=np.int8)
    tv[: g.n_interior] = t
    tv[g.n_interior :] = g.boundary_spin
    sv = g.full_spin_vector(s)
    prod_t = tv[g.edges_u].astype(np.int64) * tv[g.edges_v]
    prod_s = sv[g.edges_u].astype(np.int64) * sv[g.edges_v]
    return int(np.sum(prod_t - prod_s))


def _interior_map(g: IsingGraph, m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=np.int64)
    if m.ndim != 1 or m.size < g.n_interior:
        raise ValueError("involution must cover all interior ids")
    m_int = m[: g.n_interior]
    if m_int.size and (m_int.min() < 0 or m_int.max() >= g.n_interior):
        raise ValueError("involution maps an interior id outside the interior")
    if np.unique(m_int).size != g.n_interior:
        raise ValueError("involution is not a bijection on interior ids")
    return m_int


# --- graph file format -------------------------------------------------------
#
# Line-oriented text, one graph per file:
#   ising-graph v1 <|I|> <|B|>
#   b <id> <+1|-1> [<x> <y>]     one line per boundary vertex, ascending id
#   i <id> <x> <y>               optional, only when an embedding is present
#   e <id> <id>                  one line per edge, in edge-id order
#
# Floats are written with repr() so the round-trip is bit-exact.


def save_graph(g: IsingGraph, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(serialize_graph(g))


def serialize_graph(g: IsingGraph) -> str:
    lines = [f"ising-graph v1 {g.n_interior} {g.n_boundary}"]
    for k in range(g.n_boundary):
        vid = g.n_interior + k
        spin = "+1" if g.boundary_spin[k] > 0 else "-1"
        if g.embedding is not None:
            x, y = g.embedding[vid]
            lines.append(f"b {vid} {spin} {float(x)!r} {float(y)!r}")
        else:
            lines.append(f"b {vid} {spin}")
    if g.embedding is not None:
        for vid in range(g.n_interior):
            x, y = g.embedding[vid]
            lines.append(f"i {vid} {float(x)!r} {float(y)!r}")
    for u, v in g.edges:
        lines.append(f"e {u} {v}")
    return "\n".join(lines) + "\n"


def load_graph(path) -> IsingGraph:
    with open(path, "r", encoding="ascii") as fh:
        return parse_graph(fh.read())


def parse_graph(text: str) -> IsingGraph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise GraphFormatError("empty graph file")
    header = lines[0].split()
    if len(header) != 4 or header[0] != "ising-graph" or header[1] != "v1":
        raise GraphFormatError(f"bad header: {lines[0]!r}")
    n_interior, n_boundary = int(header[2]), int(header[3])

    boundary_spin = np.zeros(n_boundary, dtype=np.int8)
    seen_b = np.zeros(n_boundary, dtype=bool)
    coords: dict[int, tuple[float, float]] = {}
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] == "b":
            if len(parts) not in (3, 5):
                raise GraphFormatError(f"bad boundary line: {ln!r}")
            vid = int(parts[1])
            k = vid - n_interior
            if not (0 <= k < n_boundary) or seen_b[k]:
                raise GraphFormatError(f"bad or repeated boundary id {vid}")
            boundary_spin[k] = 1 if parts[2] == "+1" else -1 if parts[2] == "-1" else 0
            if boundary_spin[k] == 0:
                raise GraphFormatError(f"bad boundary spin: {ln!r}")
            seen_b[k] = True
            if len(parts) == 5:
                coords[vid] = (float(parts[3]), float(parts[4]))
        elif parts[0] == "i":
            if len(parts) != 4:
                raise GraphFormatError(f"bad interior line: {ln!r}")
            coords[int(parts[1])] = (float(parts[2]), float(parts[3]))
        elif parts[0] == "e":
            if len(parts) != 3:
                raise GraphFormatError(f"bad edge line: {ln!r}")
            edges.append((int(parts[1]), int(parts[2])))
        else:
            raise GraphFormatError(f"unknown record: {ln!r}")
    if not np.all(seen_b):
        raise GraphFormatError("missing boundary vertex lines")

    n_vertices = n_interior + n_boundary
    embedding = None
    if coords:
        if len(coords) != n_vertices:
            raise GraphFormatError("embedding must cover all vertices or none")
        embedding = np.array([coords[v] for v in range(n_vertices)], dtype=np.float64)
    return IsingGraph(n_interior, boundary_spin, np.array(edges, dtype=np.int64).reshape(-1, 2), embedding)
