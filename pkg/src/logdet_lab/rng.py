"""Counter-based random streams addressed by (master seed, replica index).

Each stream is a Philox-4x64 generator whose 128-bit key packs the master
seed in the low word and the replica index in the high word.  The Philox
counter then plays the role of the entry index, so a replica's draws do
not depend on which worker produced them or in what order.
"""

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    master_seed: int
    replica_index: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed <= _MASK64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if not 0 <= self.replica_index <= _MASK64:
            raise ValueError("replica_index must be a nonnegative 64-bit integer")

    @property
    def key(self):
        return self.master_seed | (self.replica_index << 64)

    def generator(self):
        """A fresh generator positioned at counter 0 of this stream."""
        return np.random.Generator(np.random.Philox(key=self.key))

    def child(self, replica_index):
        return RngStream(self.master_seed, replica_index)
