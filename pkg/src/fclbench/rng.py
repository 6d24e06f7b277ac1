"""Deterministic RNG derivation.

All stochastic steps derive their generator from a user-supplied 64-bit seed
plus an integer path, so a (seed, path) pair always reproduces the same
stream regardless of execution order or worker scheduling.
"""

from __future__ import annotations

import numpy as np

# Fixed stream labels; never renumber, or old seeds stop reproducing.
STREAM_GENERATE = 1
STREAM_SOLVE = 2
STREAM_PT = 3
STREAM_MINE = 4
STREAM_BENCH = 5


def derive_rng(seed: int, *path: int) -> np.random.Generator:
    """Generator for the stream identified by (seed, path)."""
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=tuple(int(p) for p in path))
    return np.random.default_rng(ss)


def derive_kernel_seed(seed: int, *path: int) -> int:
    """A 32-bit seed for compiled kernels (which use the MT19937 legacy API)."""
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, dtype=np.uint32)[0])
