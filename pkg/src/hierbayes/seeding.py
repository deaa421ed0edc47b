"""Deterministic, partitionable random streams.

Every estimator in this package takes a :class:`SeedSpec` instead of a bare
integer so that Monte Carlo work can be split into chunks (one stream per
chunk) and merged deterministically regardless of execution order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SeedSpec:
    """A (master_seed, stream_id) pair identifying one random stream.

    Distinct pairs yield statistically independent streams; identical pairs
    yield bit-identical sequences.
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        if self.stream_id < 0:
            raise ValueError("stream_id must be nonnegative")

    def rng(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_id,))
        return np.random.default_rng(seq)

    def stream(self, stream_id: int) -> "SeedSpec":
        """A sibling stream under the same master seed."""
        return SeedSpec(self.master_seed, stream_id)


def as_seed(seed) -> SeedSpec:
    if isinstance(seed, SeedSpec):
        return seed
    return SeedSpec(int(seed))
