"""Deterministic random streams for simulation and Monte Carlo work.

Streams are keyed by ``(seed, *path)`` through ``SeedSequence`` spawn keys on
top of a counter-based bit generator, so every replication's draws depend only
on its own key — never on how many other replications ran before it or on the
execution schedule.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

__all__ = ["stream", "uniform_open", "standard_normal"]


def stream(seed: int, *path: int) -> np.random.Generator:
    """Return the generator for the substream identified by ``(seed, *path)``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def uniform_open(rng: np.random.Generator, size=None) -> np.ndarray:
    """Uniform draws strictly inside (0, 1).

    Built from 53-bit integers offset by one half, so the endpoints are
    unreachable and inverse-CDF transforms never see 0 or 1.
    """
    return (rng.integers(0, 1 << 53, size=size, dtype=np.uint64) + 0.5) * 2.0**-53


def standard_normal(rng: np.random.Generator, size=None) -> np.ndarray:
    # Inverse-CDF sampling: identical bytes for a given stream on any
    # platform, unlike rejection-based samplers.
    return ndtri(uniform_open(rng, size))
