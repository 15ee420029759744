"""Reproducible per-sample random streams.

The split function is (seed, index) -> 64-bit child seed, implemented with
numpy's SeedSequence spawn keys. Batch drivers give sample i the stream
stream_rng(seed, i), so results are identical no matter how a batch is
chunked across workers, and any single sample can be reproduced from the
(seed, index) pair recorded in its SampleSet.
"""

from __future__ import annotations

import numpy as np

__all__ = ["child_seed", "stream_rng"]


def child_seed(seed: int, index: int) -> int:
    """64-bit seed of stream `index` derived from the master seed."""
    state = np.random.SeedSequence(seed, spawn_key=(index,)).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


def stream_rng(seed: int, index: int = 0) -> np.random.Generator:
    """Generator for stream `index` of the master seed."""
    return np.random.default_rng(child_seed(seed, index))
