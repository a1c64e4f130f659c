"""Deterministic seed derivation.

Every stochastic stage receives its own 64-bit seed derived from the run's
base seed plus a textual label, so results do not depend on draw order,
process scheduling, or Python's randomized `hash()`. The mix is FNV-1a over
the label bytes followed by a splitmix64 finalizer; both are fixed-width
integer recipes that give identical values on every platform.
"""

from __future__ import annotations

import numpy as np

_M64 = (1 << 64) - 1


def _fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for b in data:
        h = ((h ^ b) * 0x100000001B3) & _M64
    return h


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _M64
    return x ^ (x >> 31)


def derive_seed(base_seed: int, *parts) -> int:
    """Mix a base seed and arbitrary labels into a stable 64-bit seed."""
    label = repr(tuple(parts)).encode()
    return _splitmix64((base_seed & _M64) ^ _fnv1a64(label))


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator; the single RNG construction point for the package."""
    return np.random.default_rng(np.random.SeedSequence(seed & _M64))
