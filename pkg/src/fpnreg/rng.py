"""Counter-based random streams.

Philox (4x64, 10 rounds) keyed by (seed, substream index) gives reproducible,
order-independent substreams: trial k of a seeded experiment always sees the
same stream regardless of execution order, so parallel and sequential runs
produce the identical multiset of outcomes.
"""

from __future__ import annotations

import numpy as np

GENERATOR_ID = "numpy-philox4x64-10"

_MASK64 = (1 << 64) - 1
_MASK32 = (1 << 32) - 1


def substream(seed: int, a: int = 0, b: int = 0) -> np.random.Generator:
    """Generator for substream (a, b) of the given seed; a and b < 2^32."""
    key = np.array([seed & _MASK64, (a & _MASK32) | ((b & _MASK32) << 32)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_without_replacement(gen: np.random.Generator, pool: np.ndarray, k: int) -> np.ndarray:
    """k distinct elements of pool, sorted ascending for determinism."""
    if k > len(pool):
        raise ValueError(f"cannot draw {k} from a pool of {len(pool)}")
    pick = gen.choice(len(pool), size=k, replace=False)
    return np.sort(np.asarray(pool)[pick])
