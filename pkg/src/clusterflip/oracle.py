"""Brute-force enumeration oracle for tiny graphs.

Everything here is independent of the sampler kernels: components are found
with a local breadth-first search, distributions by direct summation over all
states.  Spin states are encoded as integers with bit i set iff s_i = +1;
edge states with bit e set iff edge e is occupied.  Transition matrices are
indexed the same way, so empirical frequencies from the samplers can be
compared row against row.

Caps: spin enumeration needs |I| <= 20; anything touching edge states needs
|I| + |E| <= 24.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import IsingGraph

MAX_SPIN_BITS = 20
MAX_TOTAL_BITS = 24


class EnumerationCapError(ValueError):
    """Graph too large for exact enumeration."""


@dataclass
class ExactDistribution:
    domain: str              # "spin-states", "edge-states", or "joint"
    weights: np.ndarray      # normalized; 1-d for marginals, [2^I, 2^E] for joint


@dataclass
class TransitionMatrix:
    kind: str                # "sw", "df-exact", "df-metropolized", "mixture(eta)"
    matrix: np.ndarray       # row-stochastic, order 2^I


def spins_from_index(idx: int, n: int) -> np.ndarray:
    """Decode a state index to a ±1 spin array (bit i set means +1)."""
    bits = (idx >> np.arange(n)) & 1
    return (2 * bits - 1).astype(np.int8)


def index_from_spins(s: np.ndarray) -> int:
    s = np.asarray(s)
    return int(np.sum((s > 0).astype(np.int64) << np.arange(s.size)))


def _require_spin_cap(g: IsingGraph) -> None:
    if g.n_interior > MAX_SPIN_BITS:
        raise EnumerationCapError(
            f"|I| = {g.n_interior} exceeds the {MAX_SPIN_BITS}-bit spin enumeration cap"
        )


def _require_total_cap(g: IsingGraph) -> None:
    total = g.n_interior + g.n_edges
    if total > MAX_TOTAL_BITS:
        raise EnumerationCapError(
            f"|I| + |E| = {total} exceeds the {MAX_TOTAL_BITS}-bit joint enumeration cap"
        )


def _spin_table(g: IsingGraph) -> np.ndarray:
    """[2^I, n_vertices] int8 table of full spin vectors for every state."""
    n_states = 1 << g.n_interior
    idx = np.arange(n_states, dtype=np.int64)
    table = np.empty((n_states, g.n_vertices), dtype=np.int8)
    for i in range(g.n_interior):
        table[:, i] = (2 * ((idx >> i) & 1) - 1).astype(np.int8)
    table[:, g.n_interior:] = g.boundary_spin
    return table


def state_energies(g: IsingGraph) -> np.ndarray:
    """Exact integer alignment sum H(s) for every spin state."""
    _require_spin_cap(g)
    table = _spin_table(g)
    energies = np.zeros(len(table), dtype=np.int64)
    for u, v in g.edges:
        energies += table[:, u].astype(np.int64) * table[:, v]
    return energies


def enumerate_pV(g: IsingGraph, beta: float) -> ExactDistribution:
    """Exact Gibbs distribution: weight(s) proportional to exp(beta * H(s))."""
    energies = state_energies(g)
    logw = beta * (energies - energies.max())
    w = np.exp(logw)
    return ExactDistribution("spin-states", w / math.fsum(w))


def _aligned_masks(g: IsingGraph) -> tuple[np.ndarray, np.ndarray]:
    """Per spin state: bitmask of aligned edges, and its popcount."""
    table = _spin_table(g)
    masks = np.zeros(len(table), dtype=np.int64)
    for e, (u, v) in enumerate(g.edges):
        aligned = (table[:, u] == table[:, v]).astype(np.int64)
        masks |= aligned << e
    return masks, np.bitwise_count(masks).astype(np.int64)


class _EdgeStateInfo:
    """Component structure of one edge configuration."""

    __slots__ = ("compatible", "n_unpinned", "base_mask", "free_masks")

    def __init__(self, compatible, n_unpinned, base_mask, free_masks):
        self.compatible = compatible      # no component pins two boundary signs
        self.n_unpinned = n_unpinned      # components containing no boundary vertex
        self.base_mask = base_mask        # interior bits forced to +1
        self.free_masks = free_masks      # interior bitmask per unpinned component


def _edge_state_info(g: IsingGraph, w_index: int) -> _EdgeStateInfo:
    """BFS decomposition of the occupied edges (independent of the sampler)."""
    adj: list[list[int]] = [[] for _ in range(g.n_vertices)]
    for e in range(g.n_edges):
        if (w_index >> e) & 1:
            u, v = int(g.edges_u[e]), int(g.edges_v[e])
            adj[u].append(v)
            adj[v].append(u)
    seen = [False] * g.n_vertices
    base_mask = 0
    free_masks: list[int] = []
    compatible = True
    for start in range(g.n_vertices):
        if seen[start]:
            continue
        seen[start] = True
        stack = [start]
        members = []
        pin = 0
        while stack:
            v = stack.pop()
            members.append(v)
            if v >= g.n_interior:
                f = int(g.boundary_spin[v - g.n_interior])
                if pin == 0:
                    pin = f
                elif pin != f:
                    compatible = False
            for nb in adj[v]:
                if not seen[nb]:
                    seen[nb] = True
                    stack.append(nb)
        interior_mask = 0
        for v in members:
            if v < g.n_interior:
                interior_mask |= 1 << v
        if pin == 0:
            free_masks.append(interior_mask)
        elif pin > 0:
            base_mask |= interior_mask
    return _EdgeStateInfo(compatible, len(free_masks), base_mask, free_masks)


def enumerate_joint_and_marginals(
    g: IsingGraph, beta: float
) -> tuple[ExactDistribution, ExactDistribution, ExactDistribution]:
    """(p_VE, p_E, p_V): the joint spin-edge distribution and its two marginals.

    p_E is built from its own product formula (per-edge Bernoulli factors times
    2^(number of interior-only components), zero for configurations that chain
    opposite boundary spins together), not by summing the joint; the
    marginalization identities are therefore a real cross-check.
    """
    _require_total_cap(g)
    n_s = 1 << g.n_interior
    n_w = 1 << g.n_edges
    q = math.exp(-2.0 * beta)
    p_occ = 1.0 - q

    table = _spin_table(g)
    joint = np.ones((n_s, n_w), dtype=np.float64)
    w_idx = np.arange(n_w, dtype=np.int64)
    for e, (u, v) in enumerate(g.edges):
        aligned = (table[:, u] == table[:, v]).astype(np.float64)
        occupied = ((w_idx >> e) & 1).astype(bool)
        factor = np.where(occupied[None, :], p_occ * aligned[:, None], q)
        joint *= factor
    joint /= math.fsum(joint.ravel())

    edge_weights = np.zeros(n_w, dtype=np.float64)
    for w in range(n_w):
        info = _edge_state_info(g, w)
        if not info.compatible:
            continue
        c1 = int(w).bit_count()
        edge_weights[w] = (p_occ ** c1) * (q ** (g.n_edges - c1)) * (2.0 ** info.n_unpinned)
    edge_weights /= math.fsum(edge_weights)

    p_v = enumerate_pV(g, beta)
    return (
        ExactDistribution("joint", joint),
        ExactDistribution("edge-states", edge_weights),
        p_v,
    )


def exact_sw_kernel(g: IsingGraph, beta: float) -> TransitionMatrix:
    """P_SW(s, t) = sum over edge configs of P(s -> w) * P(w -> t).

    P(s -> w) is the Bernoulli product (zero unless every occupied edge is
    aligned under s); P(w -> t) forces pinned components and gives each
    interior-only component a fair coin.  Accumulation is Kahan-compensated
    since a row sums 2^|E| terms.
    """
    _require_total_cap(g)
    n_s = 1 << g.n_interior
    n_w = 1 << g.n_edges
    q = math.exp(-2.0 * beta)
    p_occ = 1.0 - q

    masks, aligned_counts = _aligned_masks(g)
    kernel = np.zeros((n_s, n_s), dtype=np.float64)
    comp = np.zeros((n_s, n_s), dtype=np.float64)

    for w in range(n_w):
        valid = (w & ~masks) == 0
        if not valid.any():
            continue
        info = _edge_state_info(g, w)
        c1 = w.bit_count()
        # P(s -> w) for every compatible s
        weight_s = np.zeros(n_s, dtype=np.float64)
        weight_s[valid] = (p_occ ** c1) * q ** (aligned_counts[valid] - c1)
        share = 0.5 ** info.n_unpinned
        rows = np.nonzero(valid)[0]
        contrib = weight_s[rows] * share
        for choice in range(1 << info.n_unpinned):
            t = info.base_mask
            for bit, mask in enumerate(info.free_masks):
                if (choice >> bit) & 1:
                    t |= mask
            # Kahan step on column t
            y = contrib - comp[rows, t]
            tot = kernel[rows, t] + y
            comp[rows, t] = (tot - kernel[rows, t]) - y
            kernel[rows, t] = tot
    return TransitionMatrix("sw", kernel)


def double_flip_state_map(m: np.ndarray, n_interior: int) -> np.ndarray:
    """State index permutation of the move t_i = -s_{m(i)}."""
    m_int = np.asarray(m, dtype=np.int64)[:n_interior]
    idx = np.arange(1 << n_interior, dtype=np.int64)
    t = np.zeros_like(idx)
    for i in range(n_interior):
        src_bit = (idx >> m_int[i]) & 1
        t |= (1 - src_bit) << i
    return t


def exact_flip_kernel(g: IsingGraph, beta: float, m: np.ndarray, kind: str) -> TransitionMatrix:
    """Double flip transition matrix, exact or Metropolized.

    The exact kind is the deterministic state permutation.  The Metropolized
    kind accepts with min(1, exp(beta * (H(t) - H(s)))) and leaves the
    rejection mass on the diagonal; it satisfies detailed balance for any
    interior involution m, symmetric or not.
    """
    _require_spin_cap(g)
    n_s = 1 << g.n_interior
    targets = double_flip_state_map(m, g.n_interior)
    kernel = np.zeros((n_s, n_s), dtype=np.float64)
    rows = np.arange(n_s)
    if kind == "exact":
        kernel[rows, targets] = 1.0
        return TransitionMatrix("df-exact", kernel)
    if kind != "metropolized":
        raise ValueError(f"unknown flip kernel kind {kind!r}")
    energies = state_energies(g)
    delta = energies[targets] - energies
    accept = np.minimum(1.0, np.exp(beta * np.minimum(delta, 0)))
    np.add.at(kernel, (rows, targets), accept)
    np.add.at(kernel, (rows, rows), 1.0 - accept)
    return TransitionMatrix("df-metropolized", kernel)


def mixture_kernel(eta: float, flip: TransitionMatrix, sw: TransitionMatrix) -> TransitionMatrix:
    if not (0.0 <= eta <= 1.0):
        raise ValueError("eta must lie in [0, 1]")
    return TransitionMatrix(f"mixture({eta})", eta * flip.matrix + (1.0 - eta) * sw.matrix)


@dataclass
class BalanceReport:
    passed: bool
    max_violation: float
    worst_pair: tuple[int, int]

    def __str__(self) -> str:
        s, t = self.worst_pair
        status = "pass" if self.passed else "FAIL"
        return f"{status} (max violation {self.max_violation:.3e} at states ({s}, {t}))"


def check_detailed_balance(P: TransitionMatrix, p: ExactDistribution, tol: float) -> BalanceReport:
    """max |p(s)P(s,t) - p(t)P(t,s)| against tol, with the worst pair as witness."""
    flow = p.weights[:, None] * P.matrix
    violation = np.abs(flow - flow.T)
    worst = np.unravel_index(np.argmax(violation), violation.shape)
    max_v = float(violation[worst])
    return BalanceReport(max_v <= tol, max_v, (int(worst[0]), int(worst[1])))


def check_stationarity(P: TransitionMatrix, p: ExactDistribution, tol: float) -> BalanceReport:
    """max |(p @ P)(t) - p(t)| against tol."""
    residual = np.abs(p.weights @ P.matrix - p.weights)
    worst = int(np.argmax(residual))
    max_v = float(residual[worst])
    return BalanceReport(max_v <= tol, max_v, (worst, worst))


def rows_stochastic(P: TransitionMatrix, tol: float = 1e-12) -> bool:
    rows = P.matrix.sum(axis=1)
    return bool(np.all(P.matrix >= -tol) and np.max(np.abs(rows - 1.0)) <= tol)


def spectral_gap(P: TransitionMatrix, p: ExactDistribution, squarings: int = 10) -> float:
    """Estimate of the largest nontrivial eigenvalue magnitude.

    Deflates the stationary projector, then repeatedly squares the remainder
    with norm renormalization: ||Q^(2^k)||^(1/2^k) converges to the spectral
    radius of Q from above.
    """
    n = len(p.weights)
    Q = P.matrix - np.outer(np.ones(n), p.weights)
    nrm = np.linalg.norm(Q, 2)
    if nrm == 0.0:
        return 0.0
    # after k squarings: Q^(2^k) = exp(log_total) * M with ||M|| = 1
    M = Q / nrm
    log_total = math.log(nrm)
    power = 1
    for _ in range(squarings):
        M = M @ M
        power *= 2
        nrm = np.linalg.norm(M, 2)
        if nrm == 0.0:
            return 0.0
        log_total = 2.0 * log_total + math.log(nrm)
        M /= nrm
    return float(math.exp(log_total / power))
