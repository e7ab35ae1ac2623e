"""Deterministic, splittable RNG streams keyed by (seed, *path)."""

from __future__ import annotations

import numpy as np


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the given (seed, key...) path.

    Streams with distinct keys are statistically independent and do not
    depend on creation order, so work can be farmed out to any number of
    workers without changing results.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


def child_seed(seed: int, *key: int) -> int:
    """64-bit integer seed derived from (seed, key...), for configs that carry one."""
    ss = np.random.SeedSequence(seed, spawn_key=tuple(key))
    return int(ss.generate_state(1, np.uint64)[0])
