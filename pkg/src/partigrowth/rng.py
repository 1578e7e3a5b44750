"""Deterministic random number streams.

A stream is identified by (seed, stream id); the same pair reproduces the
same draws bit-for-bit on one build.  Replica-parallel code derives one
stream per replica as (seed, replica index) and, for the compiled kernels,
one 64-bit key per replica from the same seed material.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["RngStream"]


@dataclass
class RngStream:
    """A named, reproducible random stream backed by PCG64."""

    seed: int = 0
    stream: int = 0
    _gen: np.random.Generator | None = field(default=None, repr=False, compare=False)

    @property
    def gen(self) -> np.random.Generator:
        """The live generator; created lazily, then advances with use."""
        if self._gen is None:
            self._gen = np.random.Generator(
                np.random.PCG64(np.random.SeedSequence((self.seed, self.stream)))
            )
        return self._gen

    def fresh(self) -> "RngStream":
        """A restarted copy of this stream (state rewound to the beginning)."""
        return RngStream(self.seed, self.stream)

    def child(self, index: int) -> "RngStream":
        """Stream for replica `index`, independent of this one."""
        return RngStream(self.seed, self.stream * 1_000_003 + index + 1)

    def replica_keys(self, count: int) -> np.ndarray:
        """uint64 keys, one per replica, for the compiled simulation kernels."""
        ss = np.random.SeedSequence((self.seed, self.stream))
        return ss.generate_state(count, dtype=np.uint64)
