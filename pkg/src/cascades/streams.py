"""
Counter-based random streams.

Every stream is keyed by (master seed, purpose, counters...) and built as a
Philox generator over a SeedSequence whose spawn key carries the counters.
Sampling level k of replica r never consumes draws from any other
(replica, level) pair, so deepening a realization leaves shallower levels
bit-identical.
"""

from enum import IntEnum

import numpy as np


class StreamPurpose(IntEnum):
    BADIC_WEIGHTS = 1
    POISSON_POINTS = 2
    LOGID_CELLS = 3
    DISTORTION_GRID = 4
    MOMENT_CHECK = 5


def derive_seed_sequence(master_seed: int, purpose: StreamPurpose, *counters: int) -> np.random.SeedSequence:
    if not 0 <= master_seed < 2 ** 64:
        raise ValueError(f"master seed must be an unsigned 64-bit integer, got {master_seed}")
    if any(c < 0 for c in counters):
        raise ValueError(f"stream counters must be >= 0, got {counters}")
    return np.random.SeedSequence(entropy=master_seed, spawn_key=(int(purpose), *map(int, counters)))


def derive_stream(master_seed: int, purpose: StreamPurpose, *counters: int) -> np.random.Generator:
    """Independent generator for (master_seed, purpose, counters)."""
    return np.random.Generator(np.random.Philox(derive_seed_sequence(master_seed, purpose, *counters)))


def derive_subseed(master_seed: int, purpose: StreamPurpose, *counters: int) -> int:
    """A fresh 64-bit master seed, for runs that must not share streams with the parent."""
    state = derive_seed_sequence(master_seed, purpose, *counters).generate_state(1, dtype=np.uint64)
    return int(state[0])
