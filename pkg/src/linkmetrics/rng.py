"""Pinned deterministic PRNG: SplitMix64.

Pinned by algorithm so experiments reproduce bit-for-bit across runs and
across language ports. Reference outputs for seed 0:
    0x80B76C41CDD67260, 0x742D7B0686A972BD, 0xBBF2FC2E0635CF40

Uniform doubles take the top 53 bits; exponentials use inverse-transform
sampling, so the whole generation chain is pinned too.
"""

from __future__ import annotations

import math

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_uint64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1F4EE2B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform double in [0, 1) with 53 bits of precision."""
        return (self.next_uint64() >> 11) * (1.0 / (1 << 53))

    def exponential(self, mean: float) -> float:
        """Exponential draw via inverse transform; always > 0."""
        if mean <= 0:
            raise ValueError("mean must be positive")
        # centering in the ulp keeps u strictly inside (0, 1)
        u = ((self.next_uint64() >> 11) + 0.5) * (1.0 / (1 << 53))
        return -mean * math.log(u)


def derive_seed(seed: int, stream: int) -> int:
    """Split one user seed into independent per-purpose streams."""
    rng = SplitMix64((seed ^ (stream * _GAMMA)) & _MASK)
    return rng.next_uint64()
