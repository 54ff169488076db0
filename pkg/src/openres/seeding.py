"""Deterministic seed substreams.

Every sampler accepts either an ``int`` or a :class:`numpy.random.SeedSequence`.
Realization ``i`` of a run with master seed ``s`` uses
``SeedSequence(entropy=s, spawn_key=(i,))``; distinct ``(s, i)`` pairs give
distinct spawn keys and therefore non-overlapping streams.  Inside one
realization the stages draw from fixed children of that sequence, see
:data:`STAGES`.
"""
from __future__ import annotations

import numpy as np


# child index of each stage inside a realization substream
STAGES = {"spectrum": 0, "coupling": 1, "dynamics": 2}


def as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, (bool, float)) or seed is None:
        raise TypeError(f"seed must be an int or SeedSequence, got {seed!r}")
    seed = int(seed)
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return np.random.SeedSequence(seed)


def rng_from(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(as_seed_sequence(seed)))


def substream(master_seed: int, realization_index: int) -> np.random.SeedSequence:
    """Seed sequence of one ensemble realization."""
    if realization_index < 0:
        raise ValueError("realization_index must be non-negative")
    return np.random.SeedSequence(int(master_seed), spawn_key=(int(realization_index),))


def stage_seed(realization: np.random.SeedSequence, stage: str) -> np.random.SeedSequence:
    """Child sequence for a named stage (spectrum, coupling, dynamics)."""
    key = realization.spawn_key + (STAGES[stage],)
    return np.random.SeedSequence(realization.entropy, spawn_key=key)
