"""Deterministic random-stream derivation.

Every stochastic routine in the package draws from a Generator obtained via
:func:`substream`, keyed by a user seed plus a tuple of small integers (role
tag, trial index, layer index, ...).  Streams for distinct keys are
statistically independent and do not depend on the order in which they are
created, so trials can be batched, chunked or parallelised without changing
any sampled value.
"""
from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def _entropy(seed: int, key: tuple[int, ...]) -> tuple[int, ...]:
    return (int(seed) & _MASK64, *(int(k) & _MASK64 for k in key))


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent Generator for the stream identified by (seed, *key)."""
    ss = np.random.SeedSequence(_entropy(seed, key))
    return np.random.Generator(np.random.SFC64(ss))


def derive_seed(seed: int, *key: int) -> int:
    """Collapse (seed, *key) into a single 64-bit seed for nested sampling."""
    ss = np.random.SeedSequence(_entropy(seed, key))
    return int(ss.generate_state(1, np.uint64)[0])
