"""Splittable, counter-based random streams.

Every random quantity in the lab is drawn from a stream identified by
``(master seed, purpose tag, replica index)``. Streams are Philox generators
seeded through ``numpy.random.SeedSequence`` with the tag and index folded
into the spawn key, so two streams never overlap and any single replica can be
regenerated without replaying the others.

Usage:
    rng = stream(1234, "glauber", replica)
    child = fork(rng)
"""

import hashlib
from typing import Union

import numpy as np

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]


def tag_key(tag: str) -> int:
    """Stable 64-bit integer for a purpose tag."""
    return int.from_bytes(hashlib.blake2b(tag.encode(), digest_size=8).digest(), "little")


def derive_seed(master: int, tag: str, index: int = 0) -> np.random.SeedSequence:
    if master < 0:
        raise ValueError(f"master seed must be nonnegative, got {master}")
    return np.random.SeedSequence(entropy=int(master), spawn_key=(tag_key(tag), int(index)))


def stream(master: int, tag: str, index: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(derive_seed(master, tag, index)))


def as_generator(seed: SeedLike, tag: str = "default", index: int = 0) -> np.random.Generator:
    """Accept a master seed, a SeedSequence or a ready Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.Philox(seed))
    return stream(int(seed), tag, index)


def fork(rng: np.random.Generator) -> np.random.Generator:
    """Child generator for a sub-task, derived from the parent's state."""
    return np.random.Generator(np.random.Philox(rng.integers(0, 2**63 - 1)))
