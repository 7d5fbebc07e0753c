"""Deterministic seed derivation.

Every random object is driven by numpy's PCG64 seeded from
``SeedSequence(master_seed, spawn_key=(crc32(tag), index))``.  A stream is a
pure function of (master seed, purpose tag, index), so the order in which
trials are scheduled never changes what each trial draws.
"""

from __future__ import annotations

import secrets
import zlib

import numpy as np


def tag_key(tag: str) -> int:
    return zlib.crc32(tag.encode("utf-8"))


def derive_seed(master_seed: int, tag: str, index: int = 0) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(master_seed), spawn_key=(tag_key(tag), int(index)))


def derive_rng(master_seed: int, tag: str, index: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_seed(master_seed, tag, index)))


def as_rng(seed) -> np.random.Generator:
    """Accept an int, a SeedSequence or an existing Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def fresh_seed() -> int:
    return secrets.randbits(63)
