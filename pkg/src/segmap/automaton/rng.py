"""Counter-based random draws: a pure function of (seed, iteration, cell).

Both kernels must produce the identical stream, so the construction uses
only 64-bit wrapping integer arithmetic (the splitmix64 finalizer) and a
fixed mapping to doubles in [0, 1).
"""

from __future__ import annotations

import numpy as np

MASK = 0xFFFFFFFFFFFFFFFF
GAMMA = 0x9E3779B97F4A7C15
M1 = 0xBF58476D1CE4E5B9
M2 = 0x94D049BB133111EB
_SCALE = 1.0 / (1 << 53)


def mix(z: int) -> int:
    """splitmix64 finalizer over Python ints (wrapping at 64 bits)."""
    z = (z + GAMMA) & MASK
    z ^= z >> 30
    z = (z * M1) & MASK
    z ^= z >> 27
    z = (z * M2) & MASK
    z ^= z >> 31
    return z


def phase_base(seed: int, iteration: int) -> int:
    """Per-iteration base counter, fed to the per-cell draw."""
    return mix((mix(seed & MASK) + iteration) & MASK)


def draw(base: int, index: int) -> float:
    """One uniform double in [0, 1) for a flat cell index."""
    return (mix((base + index) & MASK) >> 11) * _SCALE


def cell_draws(base: int, indices: np.ndarray) -> np.ndarray:
    """Vectorized ``draw`` for an array of flat cell indices."""
    z = (np.uint64(base) + indices.astype(np.uint64)) + np.uint64(GAMMA)
    z ^= z >> np.uint64(30)
    z *= np.uint64(M1)
    z ^= z >> np.uint64(27)
    z *= np.uint64(M2)
    z ^= z >> np.uint64(31)
    return (z >> np.uint64(11)).astype(np.float64) * _SCALE
