"""Deterministic, splittable random streams.

Every stochastic routine takes an explicit 64-bit seed and derives
independent substreams keyed by integer indices (replicate number,
bootstrap index, ...).  Streams depend only on ``(seed, key)``, never on
execution order or worker count, which is what makes parallel runs
reproducible bit for bit.
"""

from __future__ import annotations

import numpy as np

__all__ = ["substream", "derive_seed"]


def substream(seed: int, *key: int) -> np.random.Generator:
    """Generator for the substream of ``seed`` identified by ``key``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(ss)


def derive_seed(seed: int, *key: int) -> int:
    """A 64-bit seed deterministically derived from ``(seed, key)``.

    Used when a nested procedure (e.g. the bootstrap inside a coverage
    study) needs its own top-level seed.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
