"""Deterministic 64-bit seed derivation.

All randomness in the package flows from a single master seed through
the splitmix64 mixing function: replica i of an ensemble gets the seed
``split_seed(master, i)``, and each randomization coefficient stream is
keyed by hashing the (canonicalized) cube index and component into the
replica seed.  The construction is order independent and vectorizes
over numpy uint64 arrays, which is what makes parallel and serial
ensemble execution byte-identical.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "splitmix64",
    "split_seed",
    "as_u64",
    "uniform_open",
    "uniform_halfopen",
    "MIXER_NAME",
]

MIXER_NAME = "splitmix64"

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def splitmix64(x):
    """The splitmix64 finalizer; accepts uint64 scalars or arrays."""
    with np.errstate(over="ignore"):
        z = np.asarray(x, dtype=np.uint64) + _GAMMA
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))


def as_u64(values) -> np.ndarray:
    """Reinterpret (possibly negative) integers as uint64, two's complement."""
    return np.asarray(values, dtype=np.int64).view(np.uint64)


def split_seed(master: int, index: int) -> int:
    """Derive the seed of ensemble replica ``index`` from the master seed."""
    if index < 0:
        raise ValueError(f"replica index {index} must be >= 0")
    master = int(master) & 0xFFFFFFFFFFFFFFFF
    mixed = splitmix64(splitmix64(np.uint64(master)) ^ np.uint64(index + 1))
    return int(mixed)


def uniform_open(bits) -> np.ndarray:
    """Map uint64 bits to uniforms in (0, 1] using the top 53 bits."""
    return ((np.asarray(bits, dtype=np.uint64) >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0 ** -53


def uniform_halfopen(bits) -> np.ndarray:
    """Map uint64 bits to uniforms in [0, 1) using the top 53 bits."""
    return (np.asarray(bits, dtype=np.uint64) >> np.uint64(11)).astype(np.float64) * 2.0 ** -53
