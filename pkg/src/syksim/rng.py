"""Deterministic random number generation.

Coupling tensors use SplitMix64 with the Marsaglia polar transform so that
instances are bit-reproducible from a 64-bit seed independent of platform
or numpy version.  Heavy Monte-Carlo work (trajectories, shots, random
unitaries) uses numpy PCG64 generators derived from (seed, stream) pairs.
"""
from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1


class SplitMix64:
    """64-bit counter based generator (Steele et al. splitmix64 step)."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        # 53-bit mantissa in [0, 1)
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def gaussians(self, count: int, sigma: float = 1.0) -> list:
        """Marsaglia polar method; pairs drawn until accepted."""
        out = []
        while len(out) < count:
            u = 2.0 * self.uniform() - 1.0
            v = 2.0 * self.uniform() - 1.0
            s = u * u + v * v
            if s == 0.0 or s >= 1.0:
                continue
            f = (-2.0 * np.log(s) / s) ** 0.5
            out.append(sigma * u * f)
            out.append(sigma * v * f)
        return out[:count]


def substream(seed: int, *stream: int) -> np.random.Generator:
    """Independent numpy generator for (seed, stream...) coordinates."""
    return np.random.default_rng(np.random.SeedSequence([seed & _MASK, *stream]))
