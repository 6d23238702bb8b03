"""Small deterministic RNG used for graph generation and seed derivation.

Graph fixtures must be bit-reproducible across runs, platforms, and
reimplementations, so instead of relying on a library generator whose stream
is an implementation detail, this module pins down SplitMix64 exactly:

    state_{k} = seed + k * 0x9E3779B97F4A7C15          (mod 2^64)
    output_k  = mix(state_k)                            for k = 1, 2, ...

    mix(z): z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
            z ^= z >> 27; z *= 0x94D049BB133111EB;
            z ^= z >> 31                                (mod 2^64)

Derived quantities are defined on top of the u64 stream:

    float in [0, 1):   (u64 >> 11) * 2**-53
    integer in [0, n): (u64 * n) >> 64        (multiply-high; bias < n / 2^64)
    child seed k:      output_{k+1} of the parent stream

Sampling chains use ``numpy.random.Generator`` seeded through
``derive_seed``; only the graph generators need the cross-language stream.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """The SplitMix64 finalizer on a 64-bit integer."""
    z &= _MASK
    z = (z ^ (z >> 30)) * _MIX1 & _MASK
    z = (z ^ (z >> 27)) * _MIX2 & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    """Sequential SplitMix64 stream over Python integers."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK
        return mix64(self.state)

    def random(self) -> float:
        """Uniform float64 in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def randint(self, bound: int) -> int:
        """Uniform integer in [0, bound) via multiply-high."""
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound}")
        return (self.next_u64() * bound) >> 64


def splitmix64_block(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Outputs ``offset+1 .. offset+count`` of the stream, as uint64.

    Counter form of the same stream as :class:`SplitMix64`, vectorized for
    bulk draws (the G(n, p) generator needs one uniform per node pair).
    """
    ks = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & _MASK) + ks * np.uint64(_GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        z = z ^ (z >> np.uint64(31))
    return z


def uniform_block(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Vectorized uniforms in [0, 1) matching SplitMix64.random()."""
    return (splitmix64_block(seed, count, offset) >> np.uint64(11)) * 2.0**-53


def derive_seed(master: int, index: int) -> int:
    """Child seed ``index`` of a master seed.

    Defined as output number ``index + 1`` of the master's SplitMix64
    stream, so children are independent of each other and adding more
    children never changes existing ones.
    """
    if index < 0:
        raise ValueError(f"index must be non-negative, got {index}")
    return mix64((master + (index + 1) * _GOLDEN) & _MASK)
