"""Deterministic SplitMix64 stream used for solver tie-breaking.

One algorithm, two implementations: a Python class for interpreted loops
and a numba-compatible step function for the jitted fictitious-play core.
Both produce identical streams for the same seed, which keeps results
bit-for-bit reproducible regardless of which path runs and lets the
two-player reduction of multiplayer fictitious play match the matrix
solver exactly.
"""

from __future__ import annotations

import numba
import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    """Minimal deterministic uint64 stream."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        return _mix(self.state)

    def randint(self, bound: int) -> int:
        """Uniform draw from range(bound) (modulo bias < 2^-40 for the
        bounds used here)."""
        return self.next_u64() % bound


@numba.njit(numba.types.UniTuple(numba.uint64, 2)(numba.uint64), cache=True, inline="always")
def splitmix64_next(state):  # pragma: no cover - executes inside jitted code
    state = state + numba.uint64(0x9E3779B97F4A7C15)
    z = state
    z = (z ^ (z >> numba.uint64(30))) * numba.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> numba.uint64(27))) * numba.uint64(0x94D049BB133111EB)
    z = z ^ (z >> numba.uint64(31))
    return state, z


def np_seed_to_u64(seed: int) -> np.uint64:
    return np.uint64(seed & _MASK)
