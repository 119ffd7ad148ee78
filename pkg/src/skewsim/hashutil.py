"""64-bit mixing hashes, in scalar and vectorized form.

The scalar versions are the reference used inside the simulation kernels;
the numpy versions serve the oracles and generators. Both compute the
murmur3 64-bit finalizer (fmix64) and must agree bit for bit.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
_C1 = 0xFF51AFD7ED558CCD
_C2 = 0xC4CEB9FE1A85EC53


def fmix64(x: int) -> int:
    x &= MASK64
    x ^= x >> 33
    x = (x * _C1) & MASK64
    x ^= x >> 33
    x = (x * _C2) & MASK64
    x ^= x >> 33
    return x


def fmix64_np(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.uint64, copy=True)
    with np.errstate(over="ignore"):
        x ^= x >> np.uint64(33)
        x *= np.uint64(_C1)
        x ^= x >> np.uint64(33)
        x *= np.uint64(_C2)
        x ^= x >> np.uint64(33)
    return x


def clz64(x: int) -> int:
    """Leading zero count of a 64-bit value; 64 for zero."""
    return 64 - int(x).bit_length()


def clz64_np(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.uint64, copy=True)
    n = np.full(x.shape, 64, np.int64)
    shift = np.uint64(32)
    for s in (32, 16, 8, 4, 2, 1):
        shift = np.uint64(s)
        big = x >= (np.uint64(1) << shift)
        n[big] -= s
        x[big] >>= shift
    n[x > 0] -= 1
    return n
