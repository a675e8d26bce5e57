"""Counter-based pseudo-random streams.

The generator is SplitMix64 (Steele, Lea & Flood 2014) used in counter mode:
the k-th output of a stream with 64-bit seed ``s`` is

    mix64(s + (k + 1) * 0x9E3779B97F4A7C15  mod 2^64)

where ``mix64`` is the standard SplitMix64 finalizer.  Because each output is
a pure function of (seed, counter), streams can be sampled in any order and
from any thread with identical results.  Independent child streams for
parallel trials are derived as ``child_seed(master, k) = output_k(master)``,
so trial-level parallelism never changes the sampled sequences.

A bit-identical implementation of the same function lives in the numba
kernels (see _kernels.py); equality of the two is covered by tests.
"""

from __future__ import annotations

from .errors import ValidationError

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def splitmix64(seed: int, counter: int) -> int:
    """Return the ``counter``-th 64-bit output of the stream seeded with ``seed``."""
    z = (seed + (counter + 1) * _GOLDEN) & _MASK
    z ^= z >> 30
    z = (z * _MIX1) & _MASK
    z ^= z >> 27
    z = (z * _MIX2) & _MASK
    z ^= z >> 31
    return z


def child_seed(master_seed: int, index: int) -> int:
    """Seed for the ``index``-th independent child stream of ``master_seed``."""
    if index < 0:
        raise ValidationError(f"child stream index must be nonnegative, got {index}")
    return splitmix64(master_seed & _MASK, index)


class RngStream:
    """Single-owner mutable stream over the SplitMix64 counter sequence."""

    __slots__ = ("seed", "counter")

    def __init__(self, seed: int, counter: int = 0):
        if not (0 <= seed <= _MASK):
            seed &= _MASK
        self.seed = seed
        self.counter = counter

    def next_u64(self) -> int:
        z = splitmix64(self.seed, self.counter)
        self.counter += 1
        return z

    def uniform(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def spawn(self, index: int) -> "RngStream":
        """Independent child stream; deterministic in (seed, index)."""
        return RngStream(child_seed(self.seed, index))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, counter={self.counter})"
