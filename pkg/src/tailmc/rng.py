"""Seeded random-number streams for reproducible parallel Monte Carlo.

Streams are derived from a counter-based Philox generator keyed by
``(seed, *stream ids)``.  Two streams with different id tuples are
statistically independent by construction, so replicates can be farmed
out to workers in any order without changing results.
"""

from __future__ import annotations

import numpy as np

__all__ = ["stream", "substreams"]


def stream(seed: int, *ids: int) -> np.random.Generator:
    """Return the generator for stream ``(seed, *ids)``.

    The same arguments always produce the same stream, independent of
    call order or worker assignment.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(i) for i in ids))
    return np.random.Generator(np.random.Philox(ss))


def substreams(seed: int, n: int, *ids: int) -> list[np.random.Generator]:
    """Return ``n`` independent streams ``(seed, *ids, 0..n-1)``."""
    return [stream(seed, *ids, k) for k in range(n)]
