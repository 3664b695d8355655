"""Named, reproducible random sub-streams.

All randomness in a run flows from one seed; each consumer gets its own
independent stream so components are reproducible in isolation.
"""
import numpy as np

TRANSFORM = 0
INDEX_SAMPLING = 1
PARTITION = 2


def substream(seed: int, name: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(name,)))
