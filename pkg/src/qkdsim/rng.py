"""Deterministic, seedable uniform-variate streams.

Every stochastic operation in this package draws from an explicit
:class:`RandomSource`; there is no global RNG.  The same seed produces the
identical variate sequence on every platform (the underlying generator is
PCG64 keyed directly by the seed).  Independent sub-streams for concurrent
workers or per-trial sessions are derived with :meth:`RandomSource.child`.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    # SplitMix64 finalizer: a full-avalanche 64-bit mix.
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_child_seed(seed: int, index: int) -> int:
    """Stable 64-bit mix of (seed, index): splitmix64(seed XOR splitmix64(index + 1)).

    Documented so that alternate implementations can reproduce the exact
    child streams from a master seed and a child index.
    """
    if index < 0:
        raise ValueError(f"child index must be >= 0, got {index}")
    return _splitmix64((seed & _MASK64) ^ _splitmix64((index + 1) & _MASK64))


class RandomSource:
    """A seeded stream of uniform variates in [0, 1).

    Variates are drawn from PCG64 in blocks and handed out one at a time, so
    scalar and bulk draws interleave in a single well-defined order; replaying
    a seed reproduces the identical sequence bit for bit.  Instances are not
    thread-safe; give each concurrent worker its own ``child``.
    """

    __slots__ = ("seed", "_gen", "_buf", "_pos")

    _BLOCK = 4096

    def __init__(self, seed: int):
        self.seed = seed & _MASK64
        self._gen = np.random.Generator(np.random.PCG64(self.seed))
        self._buf: list[float] = []
        self._pos = 0

    def __repr__(self) -> str:
        return f"RandomSource(seed={self.seed})"

    def uniform(self) -> float:
        """Next uniform variate in [0, 1)."""
        if self._pos >= len(self._buf):
            self._buf = self._gen.random(self._BLOCK).tolist()
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u

    def uniforms(self, k: int) -> list[float]:
        """Next ``k`` variates, consumed from the same stream as :meth:`uniform`."""
        u = self.uniform
        return [u() for _ in range(k)]

    def below(self, p: float) -> bool:
        """True with probability ``p``; consumes exactly one variate."""
        return self.uniform() < p

    def choice(self, seq):
        """Uniform element of ``seq``; consumes exactly one variate."""
        return seq[int(self.uniform() * len(seq))]

    def child(self, index: int) -> "RandomSource":
        """Derive an independent stream from (seed, index).

        Derivation uses the original seed, not the consumed state, so children
        are the same no matter how much of the parent stream has been used.
        """
        return RandomSource(derive_child_seed(self.seed, index))
