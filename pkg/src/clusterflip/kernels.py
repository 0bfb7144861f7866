"""Hot inner-loop kernels for the cluster sampler.

Each kernel is written as a plain Python function over numpy arrays and
compiled with numba's @njit at import time.  Setting CLUSTERFLIP_NO_NUMBA=1
(or any value other than 0/empty) selects the uncompiled fallback path; both
paths run the identical source, so results are bit-for-bit the same.
benchmarks/bench_kernels.py compares the two.

RNG draw discipline (fixed so traces are reproducible for a given seed):
one uniform per aligned edge in ascending edge-id order, then one uniform per
unpinned component in ascending component-id order, where component ids are
assigned by first appearance scanning vertex ids upward.
"""

from __future__ import annotations

import os

import numpy as np


def _numba_disabled() -> bool:
    return os.environ.get("CLUSTERFLIP_NO_NUMBA", "") not in ("", "0")


def _occupy_aligned_impl(edges_u, edges_v, sv, p_occupy, uniforms, w_out):
    """Fill w_out: misaligned edges 0, aligned edges Bernoulli(p_occupy).

    uniforms must hold exactly one draw per aligned edge; returns the number
    consumed.
    """
    k = 0
    for e in range(edges_u.shape[0]):
        if sv[edges_u[e]] == sv[edges_v[e]]:
            w_out[e] = 1 if uniforms[k] < p_occupy else 0
            k += 1
        else:
            w_out[e] = 0
    return k


def _components_impl(edges_u, edges_v, w, n_vertices, n_interior, boundary_spin,
                     comp_of, pinned_spin):
    """Union-find over occupied edges; canonical component ids; boundary pinning.

    comp_of gets a component id per vertex (ids ordered by first appearance in
    vertex order).  pinned_spin gets, per component, the boundary spin pinning
    it or 0 if the component contains only interior vertices.  Returns
    (n_components, n_unpinned, conflict) where conflict is the id of a
    component pinned to two different boundary spins, or -1.
    """
    parent = np.arange(n_vertices, dtype=np.int64)
    rank = np.zeros(n_vertices, dtype=np.int8)

    for e in range(edges_u.shape[0]):
        if w[e] == 0:
            continue
        # find with path halving
        x = edges_u[e]
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        y = edges_v[e]
        while parent[y] != y:
            parent[y] = parent[parent[y]]
            y = parent[y]
        if x == y:
            continue
        # union by rank
        if rank[x] < rank[y]:
            parent[x] = y
        elif rank[x] > rank[y]:
            parent[y] = x
        else:
            parent[y] = x
            rank[x] += 1

    n_comp = 0
    canon = np.full(n_vertices, -1, dtype=np.int64)
    for v in range(n_vertices):
        r = v
        while parent[r] != r:
            r = parent[r]
        x = v
        while parent[x] != r:
            nxt = parent[x]
            parent[x] = r
            x = nxt
        if canon[r] < 0:
            canon[r] = n_comp
            n_comp += 1
        comp_of[v] = canon[r]

    for c in range(n_comp):
        pinned_spin[c] = 0
    conflict = -1
    for b in range(n_interior, n_vertices):
        c = comp_of[b]
        f = boundary_spin[b - n_interior]
        if pinned_spin[c] == 0:
            pinned_spin[c] = f
        elif pinned_spin[c] != f:
            conflict = c

    n_unpinned = 0
    for c in range(n_comp):
        if pinned_spin[c] == 0:
            n_unpinned += 1
    return n_comp, n_unpinned, conflict


def _assign_spins_impl(comp_of, n_interior, n_comp, pinned_spin, uniforms, t_out):
    """New interior spins: pinned components forced, unpinned ones fair ±1.

    uniforms holds one draw per unpinned component, consumed in ascending
    component-id order (+1 iff u < 1/2).
    """
    spin_of_comp = np.empty(n_comp, dtype=np.int8)
    k = 0
    for c in range(n_comp):
        if pinned_spin[c] != 0:
            spin_of_comp[c] = pinned_spin[c]
        else:
            spin_of_comp[c] = 1 if uniforms[k] < 0.5 else -1
            k += 1
    for i in range(n_interior):
        t_out[i] = spin_of_comp[comp_of[i]]
    return k


NUMBA_ENABLED = False
if not _numba_disabled():
    try:
        from numba import njit

        _jit = njit(cache=True, nogil=True)
        occupy_aligned = _jit(_occupy_aligned_impl)
        components = _jit(_components_impl)
        assign_spins_kernel = _jit(_assign_spins_impl)
        NUMBA_ENABLED = True
    except ImportError:
        pass

if not NUMBA_ENABLED:
    occupy_aligned = _occupy_aligned_impl
    components = _components_impl
    assign_spins_kernel = _assign_spins_impl
