"""Deterministic pseudo-random numbers for reproducible experiments.

The generator is splitmix64 (algorithm id ``splitmix64-v1``): a 64-bit
counter advanced by the golden-gamma constant, finalized with two
xor-multiply-shift rounds. It is tiny, has no platform-dependent state,
and the same seed yields the same draw sequence everywhere. Uniform
doubles use the top 53 bits, so draws lie in [0, 1).
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

ALGORITHM = "splitmix64-v1"


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


def _mix_array(z: np.ndarray) -> np.ndarray:
    # Same finalizer, vectorized. uint64 arithmetic wraps mod 2**64.
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


class RngState:
    """Seeded splitmix64 stream; identical seeds give identical sequences."""

    algorithm = ALGORITHM

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64
        self._counter = self.seed

    def next_u64(self) -> int:
        self._counter = (self._counter + _GAMMA) & _MASK64
        return _mix(self._counter)

    def next_float(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * 2.0**-53

    def next_below(self, n: int) -> int:
        """Integer in [0, n) via multiply-shift (no modulo bias to speak of)."""
        if n <= 0:
            raise ValueError("n must be positive")
        return (self.next_u64() * n) >> 64

    def uniform(self, lo: float, hi: float, shape: tuple[int, ...] | None = None):
        """Uniform draw(s) in [lo, hi); scalar if shape is None, else an array.

        The array path consumes exactly the same underlying u64 sequence as
        repeated scalar calls would.
        """
        if shape is None:
            return lo + (hi - lo) * self.next_float()
        n = int(np.prod(shape)) if shape else 1
        steps = np.arange(1, n + 1, dtype=np.uint64) * np.uint64(_GAMMA)
        raw = _mix_array(np.uint64(self._counter) + steps)
        self._counter = (self._counter + n * _GAMMA) & _MASK64
        u = (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53
        return (lo + (hi - lo) * u).reshape(shape)

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next_below(i + 1)
            items[i], items[j] = items[j], items[i]

    def fork(self) -> "RngState":
        """Independent child stream seeded from this one."""
        return RngState(self.next_u64())
