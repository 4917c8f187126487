"""Seeded, portable random number source (PCG32).

All stochastic behaviour in the toolkit (parameter init, corpus shuffling,
dropout masks) draws from this generator so that a fixed 64-bit seed gives
byte-identical results on every platform. The generator is the PCG32
(XSH-RR 64/32) member of the PCG family, implemented directly so we do not
depend on any library's stream stability guarantees.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_MULTIPLIER = 6364136223846793005
# Default stream constant of the reference implementation.
_DEFAULT_STREAM = 1442695040888963407


class Rng:
    """PCG32 generator with a fixed 64-bit seed.

    Identical seeds reproduce identical draw sequences across runs and
    platforms; this is asserted against the reference vectors in the tests.
    """

    ALGORITHM = "pcg32"

    def __init__(self, seed: int, stream: int = _DEFAULT_STREAM >> 1):
        self.seed = seed & _MASK64
        self._inc = ((stream << 1) | 1) & _MASK64
        self._state = 0
        self._next_uint32()
        self._state = (self._state + self.seed) & _MASK64
        self._next_uint32()

    def _next_uint32(self) -> int:
        old = self._state
        self._state = (old * _MULTIPLIER + self._inc) & _MASK64
        xorshifted = (((old >> 18) ^ old) >> 27) & 0xFFFFFFFF
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << ((-rot) & 31))) & 0xFFFFFFFF

    def next_uint32(self) -> int:
        return self._next_uint32()

    def random(self) -> float:
        """Uniform float64 in [0, 1) with 32 bits of resolution."""
        return self._next_uint32() / 4294967296.0

    def uniform(self, low: float, high: float) -> float:
        return low + (high - low) * self.random()

    def uniform_array(self, shape, low: float, high: float) -> np.ndarray:
        """Dense array of uniform draws, filled in row-major order."""
        n = int(np.prod(shape))
        out = np.empty(n, dtype=np.float64)
        for i in range(n):
            out[i] = self.random()
        return (low + (high - low) * out).reshape(shape)

    def below(self, bound: int) -> int:
        """Unbiased integer in [0, bound) via rejection sampling."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        threshold = (1 << 32) % bound
        while True:
            r = self._next_uint32()
            if r >= threshold:
                return r % bound

    def randint(self, low: int, high: int) -> int:
        """Integer in [low, high] inclusive."""
        return low + self.below(high - low + 1)

    def shuffled(self, items):
        """Return a new list holding a Fisher-Yates shuffle of ``items``."""
        out = list(items)
        for i in range(len(out) - 1, 0, -1):
            j = self.below(i + 1)
            out[i], out[j] = out[j], out[i]
        return out

    def choice(self, items):
        return items[self.below(len(items))]
