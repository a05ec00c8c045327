"""
Seeded, counter-based random streams.

Every draw is addressed by a master seed plus a tuple of integer counters
(realization, layer, bond, ...). The counters become the SeedSequence spawn key
of a Philox generator, so any single stream can be rebuilt in isolation and the
bit stream does not depend on scheduling or platform.
"""
import numpy as np

from .errors import ParameterError

SEED_LIMIT = 2**64


def check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or not 0 <= seed < SEED_LIMIT:
        raise ParameterError(f"seed must be an integer in [0, 2^64) (got {seed})", seed=seed)
    return int(seed)


class SeededStreams:
    """Factory of independent numpy Generators keyed by counters under one master seed."""

    def __init__(self, seed: int):
        self._seed = check_seed(seed)

    @property
    def seed(self) -> int:
        return self._seed

    def stream(self, *counters: int) -> np.random.Generator:
        for counter in counters:
            if counter < 0:
                raise ParameterError(f"stream counters must be >= 0 (got {counters})", counters=counters)
        sequence = np.random.SeedSequence(self._seed, spawn_key=tuple(int(c) for c in counters))
        return np.random.Generator(np.random.Philox(sequence))
