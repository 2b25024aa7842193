"""
Named random streams derived from one master seed.

Each component (walks, negatives, folds, init, shuffle, grounding samples)
draws from its own stream so changing one never shifts another.
"""

import zlib
from typing import Union

import numpy as np

SeedPart = Union[int, str]


def _word(part: SeedPart) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    if part < 0:
        raise ValueError(f"Seed parts must be non-negative, got {part}")
    return int(part)


def derive_seed(master: int, *parts: SeedPart) -> np.random.SeedSequence:
    """SeedSequence for the stream identified by ``parts`` under ``master``."""
    return np.random.SeedSequence([_word(master)] + [_word(p) for p in parts])


def rng_for(master: int, *parts: SeedPart) -> np.random.Generator:
    """
    Independent generator for one named stream.

    Args:
        master: Experiment master seed
        parts: Stream name and optional sub-keys, e.g. ("ground", 3, "leo", "marty")

    Returns:
        np.random.Generator: PCG64 generator seeded deterministically
    """
    return np.random.default_rng(derive_seed(master, *parts))
