"""Small deterministic generator for reproducible noise draws.

SplitMix64 is used instead of numpy's generators so that draws are
bit-identical across numpy versions and trivially reimplementable when
comparing against an independent code.  One instance per trial, seeded
from the experiment seed and the trial index, keeps noise draws aligned
across noise amplitudes (common random numbers).
"""

__all__ = ["SplitMix64"]

_MASK = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 sequence starting from ``seed``."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self, low: float = 0.0, high: float = 1.0) -> float:
        """Uniform draw in [low, high) with 53-bit resolution."""
        unit = (self.next_u64() >> 11) * 2.0 ** -53
        return low + (high - low) * unit
