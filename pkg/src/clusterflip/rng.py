"""Deterministic seeded random streams.

Every stochastic routine in this package draws from an RngStream, a thin
wrapper over numpy's PCG64 generator keyed by (seed, stream).  Two streams
built from the same pair produce identical draw sequences; distinct stream
indices give statistically independent sequences, which is what the replica
runner relies on.
"""

from __future__ import annotations

import numpy as np


class RngStream:
    """Reproducible uniform source keyed by a 64-bit seed and a stream index."""

    def __init__(self, seed: int, stream: int = 0):
        if seed < 0:
            raise ValueError("seed must be nonnegative")
        if stream < 0:
            raise ValueError("stream index must be nonnegative")
        self.seed = int(seed)
        self.stream = int(stream)
        self._gen = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream,)))
        )

    def uniform(self) -> float:
        """One uniform draw on [0, 1)."""
        return float(self._gen.random())

    def uniforms(self, n: int) -> np.ndarray:
        """Array of n uniform draws on [0, 1)."""
        return self._gen.random(n)

    def spins(self, n: int) -> np.ndarray:
        """n fair ±1 draws (one uniform consumed per spin, +1 iff u < 1/2)."""
        return np.where(self._gen.random(n) < 0.5, 1, -1).astype(np.int8)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream={self.stream})"
