"""Seed mixing and packed-bit helpers shared across the package."""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def splitmix64(z: int) -> int:
    """One SplitMix64 output step (Steele/Lea/Flood finalizer)."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix64(*parts: int) -> int:
    """Fold integers into one 64-bit value.

    Starts from a fixed constant and absorbs each part through a SplitMix64
    step, so any documented tuple of inputs reproduces the same stream seed.
    """
    h = 0x9E3779B97F4A7C15
    for p in parts:
        h = splitmix64(h ^ (int(p) & _MASK64))
    return h


def rng_from(*parts: int) -> np.random.Generator:
    """Deterministic PCG64 generator keyed by mix64 of the parts."""
    return np.random.default_rng(mix64(*parts))


def parity_u64(arr: np.ndarray) -> np.ndarray:
    """Bitwise parity (popcount mod 2) of each element of a uint64 array."""
    v = np.asarray(arr, dtype=np.uint64).copy()
    for shift in (32, 16, 8, 4, 2, 1):
        v ^= v >> np.uint64(shift)
    return (v & np.uint64(1)).astype(np.uint8)
