"""Double flip moves: exact involution variant and Metropolized matching variant.

A graph involution is a vertex permutation m with m∘m = id that preserves the
edge set, keeps interior and boundary vertices in their own classes, and
negates the boundary spins.  The double flip sends s to t with t_i = -s_{m(i)};
under a valid involution this preserves the alignment sum exactly, so the move
is always accepted.  When the lattice is only approximately symmetric, a
discrete involution is built by greedily matching reflected vertex positions
to original ones, and the flip is accepted with the Metropolis probability
min(1, exp(beta * (H(t) - H(s)))).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import IsingGraph, alignment_delta_under_flip, validate_spins
from .rng import RngStream


class InvolutionError(ValueError):
    """An involution was required but the given map fails an axiom."""


def validate_involution(g: IsingGraph, m: np.ndarray) -> list[str]:
    """Check the three involution axioms; returns [] on pass, else witnesses.

    Axioms: m maps interior to interior and boundary to boundary with m^2 = id;
    uv is an edge iff m(u)m(v) is an edge; f_{m(b)} = -f_b.
    """
    m = np.asarray(m, dtype=np.int64)
    violations: list[str] = []
    if m.shape != (g.n_vertices,):
        return [f"map covers {m.size} ids, graph has {g.n_vertices} vertices"]
    if m.size == 0:
        return []
    if m.min() < 0 or m.max() >= g.n_vertices or np.unique(m).size != g.n_vertices:
        return ["map is not a permutation of the vertex ids"]

    bad = np.nonzero(m[m] != np.arange(g.n_vertices))[0]
    if bad.size:
        v = int(bad[0])
        violations.append(f"m(m({v})) = {int(m[m[v]])} != {v} (not self-inverse)")

    interior = np.arange(g.n_interior)
    bad = interior[m[interior] >= g.n_interior]
    if bad.size:
        v = int(bad[0])
        violations.append(f"interior vertex {v} maps to boundary vertex {int(m[v])}")
    boundary = np.arange(g.n_interior, g.n_vertices)
    bad = boundary[m[boundary] < g.n_interior]
    if bad.size:
        v = int(bad[0])
        violations.append(f"boundary vertex {v} maps to interior vertex {int(m[v])}")

    edge_set = {(int(a), int(b)) for a, b in np.sort(g.edges, axis=1)}
    for u, v in g.edges:
        mu, mv = int(m[u]), int(m[v])
        if (min(mu, mv), max(mu, mv)) not in edge_set:
            violations.append(f"edge ({int(u)},{int(v)}) maps to non-edge ({mu},{mv})")
            break

    for k in range(g.n_boundary):
        b = g.n_interior + k
        mb = int(m[b])
        if mb >= g.n_interior:
            fb = int(g.boundary_spin[k])
            fmb = int(g.boundary_spin[mb - g.n_interior])
            if fmb != -fb:
                violations.append(f"f_m({b}) = {fmb}, expected {-fb}")
                break
    return violations


def double_flip(s: np.ndarray, m: np.ndarray, n_interior: int | None = None) -> np.ndarray:
    """t with t_i = -s_{m(i)}; m may be a full vertex permutation or interior-only."""
    s = np.asarray(s, dtype=np.int8)
    n = s.size if n_interior is None else n_interior
    m_int = np.asarray(m, dtype=np.int64)[:n]
    return (-s[m_int]).astype(np.int8)


def random_interior_involution(n_interior: int, rng: RngStream) -> np.ndarray:
    """Random involution on interior ids (random pairing, odd one out fixed).

    Deliberately ignores the graph structure; useful for exercising the
    Metropolized move, whose detailed balance needs only m^2 = id.
    """
    ids = np.arange(n_interior, dtype=np.int64)
    order = np.argsort(rng.uniforms(n_interior), kind="stable")
    m = ids.copy()
    shuffled = ids[order]
    for k in range(0, n_interior - 1, 2):
        a, b = shuffled[k], shuffled[k + 1]
        m[a] = b
        m[b] = a
    return m


# --- geometric involutions ----------------------------------------------------

_NAMED_MAPS = {
    # exact matrices (no trig rounding) for the standard symmetries
    "x-axis": np.array([[1.0, 0.0], [0.0, -1.0]]),
    "y-axis": np.array([[-1.0, 0.0], [0.0, 1.0]]),
    "diagonal": np.array([[0.0, -1.0], [-1.0, 0.0]]),  # reflection about y = -x
    "point": np.array([[-1.0, 0.0], [0.0, -1.0]]),
}


@dataclass(frozen=True)
class GeometricInvolution:
    """Linear involution of the plane: a reflection or the point reflection."""

    kind: str
    matrix: np.ndarray

    @classmethod
    def named(cls, name: str) -> "GeometricInvolution":
        if name not in _NAMED_MAPS:
            raise ValueError(f"unknown involution name {name!r}; have {sorted(_NAMED_MAPS)}")
        return cls(name, _NAMED_MAPS[name].copy())

    @classmethod
    def reflection(cls, theta: float) -> "GeometricInvolution":
        """Reflection about the line through the origin at angle theta."""
        c, s = math.cos(2.0 * theta), math.sin(2.0 * theta)
        return cls(f"reflection({theta})", np.array([[c, s], [s, -c]]))

    def apply(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(points, dtype=np.float64) @ self.matrix.T


def boundary_negation_violations(bc, mu: GeometricInvolution, n_samples: int = 4096,
                                 edge_margin: float = 1e-9) -> int:
    """How many sampled circle angles keep their sign under mu.

    Samples angles uniformly, skipping those within edge_margin of an arc
    endpoint or axis (the sign there is a convention, not a symmetry fact).
    0 means mu maps the +1 boundary region onto the -1 region.
    """
    from .lattices import spin_at_point  # deferred: lattices imports this module

    if bc.kind == "quadrant-pm":
        endpoints = [0.0, math.pi / 2, math.pi, 3 * math.pi / 2]
    else:
        endpoints = [e for lo_hi in bc.arcs for e in lo_hi]
    bad = 0
    for k in range(n_samples):
        theta = 2.0 * math.pi * (k + 0.5) / n_samples
        if any(abs((theta - e + math.pi) % (2 * math.pi) - math.pi) < edge_margin for e in endpoints):
            continue
        x, y = math.cos(theta), math.sin(theta)
        fx = spin_at_point(bc, x, y)
        px, py = mu.apply(np.array([x, y]))
        if spin_at_point(bc, float(px), float(py)) != -fx:
            bad += 1
    return bad


# --- greedy matching ----------------------------------------------------------


@dataclass
class MatchingReport:
    """Interior involution built by matching reflected positions to originals."""

    pairs: np.ndarray          # pairs[i] = m(i), interior ids only
    displacement: np.ndarray   # per vertex: dist(mu(x_i), x_{m(i)}) in the chosen norm
    norm: str

    @property
    def max_displacement(self) -> float:
        return float(self.displacement.max()) if self.displacement.size else 0.0

    @property
    def mean_displacement(self) -> float:
        return float(self.displacement.mean()) if self.displacement.size else 0.0


def _norms(diff: np.ndarray, norm: str) -> np.ndarray:
    if norm == "l2":
        return np.hypot(diff[..., 0], diff[..., 1])
    if norm == "linf":
        return np.maximum(np.abs(diff[..., 0]), np.abs(diff[..., 1]))
    raise ValueError(f"unknown norm {norm!r}")


def build_matching(g: IsingGraph, mu: GeometricInvolution, norm: str = "linf") -> MatchingReport:
    """Greedy involution construction from the geometric flip.

    Interior vertices are scanned by decreasing distance to the origin (ties
    by ascending id).  Each unpaired j grabs the unpaired i whose reflected
    position mu(x_i) is nearest to x_j (ties by ascending id); i == j is a
    legal self-pair.  The result is an involution by construction.
    """
    if g.embedding is None:
        raise ValueError("matching requires an embedded graph")
    x = g.embedding[: g.n_interior]
    mu_x = mu.apply(x)
    n = g.n_interior

    radius = _norms(x, norm)
    # decreasing radius, ties by ascending id
    order = np.lexsort((np.arange(n), -radius))

    m = np.full(n, -1, dtype=np.int64)
    dist_buf = np.empty(n, dtype=np.float64)
    for j in order:
        if m[j] >= 0:
            continue
        dist_buf[:] = _norms(mu_x - x[j], norm)
        dist_buf[m >= 0] = np.inf
        i = int(np.argmin(dist_buf))  # first minimum = lowest id
        m[i] = j
        m[j] = i

    displacement = _norms(mu_x - x[m], norm)
    return MatchingReport(pairs=m, displacement=displacement, norm=norm)


# --- Metropolized move ----------------------------------------------------------


@dataclass
class FlipOutcome:
    proposed: np.ndarray
    accepted: bool
    acceptance_prob: float


def metropolized_double_flip(g: IsingGraph, s: np.ndarray, m: np.ndarray,
                             beta: float, rng: RngStream) -> FlipOutcome:
    """Propose t_i = -s_{m(i)}, accept with min(1, exp(beta*(H(t)-H(s)))).

    One uniform is always consumed for the accept decision.  A rejected
    outcome leaves the chain's configuration untouched (proposed is still
    reported for inspection).
    """
    s = validate_spins(g, s)
    delta = alignment_delta_under_flip(g, s, m)
    c = min(1.0, math.exp(beta * delta)) if delta < 0 else 1.0
    t = double_flip(s, m, g.n_interior)
    u = rng.uniform()
    return FlipOutcome(proposed=t, accepted=u <= c, acceptance_prob=c)
