"""Mixture chain: Swendsen-Wang steps interleaved with double flip moves.

Each iteration draws one mixture uniform (always consumed, even when eta = 0,
so traces with different eta but equal seeds stay comparable), performs the
flip move if the draw lands below eta and a Swendsen-Wang step otherwise, and
records the average interior spin after the move.  A profile transition is a
strict sign change of the average spin along the trace, skipping exact zeros.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .flip import InvolutionError, validate_involution
from .model import IsingGraph, alignment_delta_under_flip, validate_spins
from .rng import RngStream
from .sw import _sw_step_sv, occupation_probability

INITIAL_KINDS = ("all-minus", "all-plus", "random")
FLIP_KINDS = ("none", "exact", "metropolized")


@dataclass(frozen=True)
class ChainConfig:
    beta: float
    eta: float
    iterations: int
    seed: int
    initial: str = "all-minus"
    flip_kind: str = "none"

    def __post_init__(self):
        if not (self.beta >= 0.0 and np.isfinite(self.beta)):
            raise ValueError("beta must be finite and nonnegative")
        if not (0.0 <= self.eta <= 1.0):
            raise ValueError("eta must lie in [0, 1]")
        if (self.eta == 0.0) != (self.flip_kind == "none"):
            raise ValueError("eta = 0 exactly when flip_kind is 'none'")
        if self.iterations < 1:
            raise ValueError("iterations must be positive")
        if self.initial not in INITIAL_KINDS:
            raise ValueError(f"initial must be one of {INITIAL_KINDS}")
        if self.flip_kind not in FLIP_KINDS:
            raise ValueError(f"flip_kind must be one of {FLIP_KINDS}")


@dataclass
class ChainTrace:
    avg_spin: np.ndarray      # average interior spin after each iteration
    move: np.ndarray          # uint8: 0 = sw, 1 = flip
    accepted: np.ndarray      # bool per iteration (sw moves always True)
    seed: int
    stream: int
    final_spins: np.ndarray
    wall_time_ms: float
    snapshots: list[tuple[int, np.ndarray]] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.avg_spin)

    @property
    def flip_attempts(self) -> int:
        return int(np.count_nonzero(self.move == 1))

    @property
    def flip_accepts(self) -> int:
        return int(np.count_nonzero((self.move == 1) & self.accepted))

    @property
    def transitions(self) -> int:
        return count_transitions(self.avg_spin)


def average_spin(s: np.ndarray) -> float:
    """Mean of the ±1 interior spins."""
    s = np.asarray(s)
    return float(s.astype(np.int64).sum()) / s.size


def count_transitions(trace_or_values) -> int:
    """Strict sign changes of the average spin; zeros are skipped."""
    values = trace_or_values.avg_spin if isinstance(trace_or_values, ChainTrace) else trace_or_values
    count = 0
    last = 0
    for v in np.asarray(values):
        sign = 1 if v > 0 else (-1 if v < 0 else 0)
        if sign == 0:
            continue
        if last != 0 and sign != last:
            count += 1
        last = sign
    return count


def _initial_spins(g: IsingGraph, cfg: ChainConfig, rng: RngStream) -> np.ndarray:
    if cfg.initial == "all-minus":
        return np.full(g.n_interior, -1, dtype=np.int8)
    if cfg.initial == "all-plus":
        return np.full(g.n_interior, 1, dtype=np.int8)
    return rng.spins(g.n_interior)


def _check_involution(g: IsingGraph, cfg: ChainConfig, involution) -> np.ndarray | None:
    if cfg.flip_kind == "none":
        return None
    if involution is None:
        raise InvolutionError(f"flip_kind={cfg.flip_kind!r} requires an involution")
    m = np.asarray(involution, dtype=np.int64)
    if cfg.flip_kind == "exact":
        if m.shape != (g.n_vertices,):
            raise InvolutionError("exact flips need a full vertex involution")
        violations = validate_involution(g, m)
        if violations:
            raise InvolutionError("involution invalid: " + "; ".join(violations[:3]))
        return m[: g.n_interior]
    # metropolized: only m^2 = id on interior ids is required
    m_int = m[: g.n_interior]
    if m_int.min() < 0 or m_int.max() >= g.n_interior:
        raise InvolutionError("interior involution maps outside the interior")
    if not np.array_equal(m_int[m_int], np.arange(g.n_interior)):
        raise InvolutionError("interior map is not an involution")
    return m_int


def swdf_step(g: IsingGraph, s: np.ndarray, cfg: ChainConfig, involution,
              rng: RngStream) -> tuple[np.ndarray, tuple[str, bool]]:
    """One mixture iteration; returns (new spins, (move, accepted))."""
    s = validate_spins(g, s)
    m_int = _check_involution(g, cfg, involution)
    sv = g.full_spin_vector(s)
    p_occ = occupation_probability(cfg.beta)
    t = np.empty(g.n_interior, dtype=np.int8)
    move, accepted = _one_step(g, sv, cfg, m_int, p_occ, rng, t)
    return sv[: g.n_interior].copy(), (move, accepted)


def _one_step(g, sv, cfg, m_int, p_occ, rng, t_buf) -> tuple[str, bool]:
    """Advance sv in place by one iteration.  Consumes the mixture draw first."""
    u = rng.uniform()
    if u < cfg.eta:
        s_int = sv[: g.n_interior]
        if cfg.flip_kind == "exact":
            sv[: g.n_interior] = -s_int[m_int]
            return "flip", True
        delta = alignment_delta_under_flip(g, s_int, m_int)
        c = min(1.0, float(np.exp(cfg.beta * delta)))
        if rng.uniform() <= c:
            sv[: g.n_interior] = -s_int[m_int]
            return "flip", True
        return "flip", False
    _sw_step_sv(g, sv, p_occ, rng, t_buf)
    sv[: g.n_interior] = t_buf
    return "sw", True


def run_chain(g: IsingGraph, cfg: ChainConfig, involution=None, stream: int = 0,
              snapshot_interval: int = 0) -> ChainTrace:
    """Run the full chain; deterministic given (graph, config, involution, stream)."""
    m_int = _check_involution(g, cfg, involution)
    rng = RngStream(cfg.seed, stream)
    start = time.perf_counter()

    s0 = _initial_spins(g, cfg, rng)
    sv = g.full_spin_vector(s0)
    p_occ = occupation_probability(cfg.beta)

    n = cfg.iterations
    avg = np.empty(n, dtype=np.float64)
    move = np.empty(n, dtype=np.uint8)
    accepted = np.empty(n, dtype=bool)
    t_buf = np.empty(g.n_interior, dtype=np.int8)
    snapshots: list[tuple[int, np.ndarray]] = []

    denom = float(g.n_interior) if g.n_interior else 1.0
    for it in range(n):
        kind, acc = _one_step(g, sv, cfg, m_int, p_occ, rng, t_buf)
        move[it] = 1 if kind == "flip" else 0
        accepted[it] = acc
        avg[it] = int(sv[: g.n_interior].sum()) / denom
        if snapshot_interval > 0 and (it + 1) % snapshot_interval == 0:
            snapshots.append((it, sv[: g.n_interior].copy()))

    wall_ms = (time.perf_counter() - start) * 1000.0
    return ChainTrace(
        avg_spin=avg, move=move, accepted=accepted, seed=cfg.seed, stream=stream,
        final_spins=sv[: g.n_interior].copy(), wall_time_ms=wall_ms, snapshots=snapshots,
    )


def worker_cap(default: int | None = None) -> int:
    """Worker count cap from CLUSTERFLIP_THREADS (default: cpu count)."""
    env = os.environ.get("CLUSTERFLIP_THREADS", "")
    if env:
        cap = int(env)
        if cap < 1:
            raise ValueError("CLUSTERFLIP_THREADS must be >= 1")
        return cap
    return default if default is not None else (os.cpu_count() or 1)


def run_replicas(g: IsingGraph, cfg: ChainConfig, involution=None, replicas: int = 1,
                 snapshot_interval: int = 0) -> list[ChainTrace]:
    """R independent chains with stream indices 0..R-1, run concurrently.

    The graph is shared read-only; each chain owns its spins and rng stream.
    """
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    if replicas == 1:
        return [run_chain(g, cfg, involution, stream=0, snapshot_interval=snapshot_interval)]
    workers = min(replicas, worker_cap())
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(run_chain, g, cfg, involution, r, snapshot_interval)
            for r in range(replicas)
        ]
        return [f.result() for f in futures]


# --- trace / summary files -----------------------------------------------------


def write_trace_csv(trace: ChainTrace, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write("iter,avg_spin,move,accepted\n")
        for it in range(trace.iterations):
            kind = "flip" if trace.move[it] else "sw"
            acc = 1 if trace.accepted[it] else 0
            fh.write(f"{it},{float(trace.avg_spin[it])!r},{kind},{acc}\n")


def summary_dict(trace: ChainTrace) -> dict:
    return {
        "transitions": trace.transitions,
        "flip_attempts": trace.flip_attempts,
        "flip_accepts": trace.flip_accepts,
        "final_avg_spin": average_spin(trace.final_spins),
        "seed": trace.seed,
        "wall_time_ms": trace.wall_time_ms,
    }


def write_summary_json(summary: dict, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
