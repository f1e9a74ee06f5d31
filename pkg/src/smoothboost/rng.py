"""Seed discipline: every random draw in the package flows from an explicit seed."""
from __future__ import annotations

import numpy as np

_MASK = (1 << 63) - 1


def make_rng(seed: int) -> np.random.Generator:
    """Fresh generator for a user-facing seed."""
    return np.random.default_rng(int(seed) & _MASK)


def derive_rng(master: int, *path: int) -> np.random.Generator:
    """Derive an independent stream from (master, *path).

    The full tuple keys the stream, so e.g. (seed, round, entity) gives each
    entity its own per-round generator that is stable under replay.
    """
    entropy = [int(master) & _MASK] + [int(p) & _MASK for p in path]
    return np.random.default_rng(entropy)
