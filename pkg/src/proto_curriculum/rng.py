"""Counter-based deterministic random streams (splitmix64 family).

Every random value is a pure function of (master_seed, epoch, counter), so
draws can be generated in any order, on any number of workers, in any
language with 64-bit integer arithmetic, and come out identical.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_SEED_TAG = 0xD1B54A32D192ED03
_MULT_A = 0xBF58476D1CE4E5B9
_MULT_B = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """splitmix64 finalizer: avalanching bijection on 64-bit integers."""
    z &= _MASK
    z ^= z >> 30
    z = (z * _MULT_A) & _MASK
    z ^= z >> 27
    z = (z * _MULT_B) & _MASK
    z ^= z >> 31
    return z


def mix64_array(z: np.ndarray) -> np.ndarray:
    """Vectorized mix64 over a uint64 array (wrapping arithmetic)."""
    z = z.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= np.uint64(_MULT_A)
    z ^= z >> np.uint64(27)
    z *= np.uint64(_MULT_B)
    z ^= z >> np.uint64(31)
    return z


def derive_epoch_seed(master_seed: int, epoch: int) -> int:
    """Per-epoch stream seed; recorded in schedules so consumers skip the derivation."""
    return mix64(((master_seed ^ _SEED_TAG) + (epoch + 1) * GAMMA) & _MASK)


def stream_u64(epoch_seed: int, counters: np.ndarray) -> np.ndarray:
    """64-bit outputs for the given draw counters under one epoch seed."""
    c = counters.astype(np.uint64, copy=False)
    state = (c + np.uint64(1)) * np.uint64(GAMMA) + np.uint64(epoch_seed & _MASK)
    return mix64_array(state)


def stream_u64_scalar(epoch_seed: int, counter: int) -> int:
    return mix64((epoch_seed + (counter + 1) * GAMMA) & _MASK)


def u64_to_unit(values: np.ndarray) -> np.ndarray:
    """Map u64 words to floats in [0, 1) using the top 53 bits (exact)."""
    return (values >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


def u64_to_unit_scalar(value: int) -> float:
    return float(value >> 11) * 2.0 ** -53
