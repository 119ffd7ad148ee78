"""Count-min based heavy hitter detection.

Each key is owned by one primary (hash of the key), and every PE keeps a
full d x w sketch over its key range plus a candidate key set. Sketches of
different owners stay disjoint; a helper's sketch is element-wise added
into its primary's at merge time, which is exact because both cover the
same key range with the same row hashes.
"""

from __future__ import annotations

import numpy as np

from ..hashutil import MASK64, fmix64
from .base import KIND_HHD, AppError, AppFactory, AppInstance

_ROUTE_SALT = 0xA076_1D64_78BD_642F


def _row_hashes(depth: int, seed: int) -> tuple:
    rng = np.random.default_rng(seed)
    a = (rng.integers(1, 1 << 62, size=depth, dtype=np.uint64) << np.uint64(1)) | np.uint64(1)
    b = rng.integers(0, 1 << 62, size=depth, dtype=np.uint64)
    return a, b


def _columns(key: int, a: np.ndarray, b: np.ndarray, width: int) -> list:
    return [((int(a[i]) * key + int(b[i])) & MASK64) % width for i in range(len(a))]


class HHDInstance(AppInstance):
    kind = KIND_HHD

    def __init__(self, cfg, depth: int, width: int, phi: float, seed: int):
        super().__init__(cfg)
        if depth < 1 or width < 1:
            raise AppError("sketch depth and width must be >= 1")
        if not 0.0 < phi < 1.0:
            raise AppError("heavy threshold must be in (0, 1)")
        self.depth = depth
        self.width = width
        self.phi = phi
        self.params = [depth, width]
        a, b = _row_hashes(depth, seed)
        self.arrays["hhd_a"] = a
        self.arrays["hhd_b"] = b
        self.arrays["sketch"] = np.zeros((cfg.num_pes, depth, width), np.int64)
        self.aux["candidates"] = [set() for _ in range(cfg.num_pes)]

    def prepare(self, key, value):
        return fmix64(key ^ _ROUTE_SALT) % self.cfg.m_pripe, 0

    def owner(self, key: int) -> int:
        return fmix64(key ^ _ROUTE_SALT) % self.cfg.m_pripe

    def fold(self, helper, primary):
        sk = self.arrays["sketch"]
        sk[primary] += sk[helper]
        sk[helper] = 0
        cands = self.aux["candidates"]
        cands[primary] |= cands[helper]
        cands[helper].clear()

    def estimate(self, pe: int, key: int) -> int:
        sk = self.arrays["sketch"][pe]
        cols = _columns(key, self.arrays["hhd_a"], self.arrays["hhd_b"], self.width)
        return int(min(sk[i, c] for i, c in enumerate(cols)))

    def finalize(self, serving, total_tuples):
        self._fold_remaining(serving)
        threshold = self.phi * total_tuples
        estimates = {}
        for r in range(self.cfg.m_pripe):
            for key in self.aux["candidates"][r]:
                estimates[key] = self.estimate(r, key)
        heavy = {k for k, est in estimates.items() if est >= threshold}
        candidates = set(estimates)
        return {"heavy": heavy, "estimates": estimates, "candidates": candidates}

    def per_pe_entries(self):
        return self.depth * self.width


class HHDApp(AppFactory):
    name = "hhd"

    def __init__(self, depth: int = 4, width: int = 2048, phi: float = 0.1,
                 seed: int = 7):
        self.depth = depth
        self.width = width
        self.phi = phi
        self.seed = seed

    def instantiate(self, cfg, stream):
        return HHDInstance(cfg, self.depth, self.width, self.phi, self.seed)

    def reference(self, stream):
        """Exact frequencies; heavy set by true count, candidates are all
        distinct keys (matching the simulated candidate policy)."""
        keys, counts = np.unique(np.asarray(stream.keys), return_counts=True)
        n = len(stream)
        exact = {int(k): int(c) for k, c in zip(keys, counts)}
        heavy = {k for k, c in exact.items() if c >= self.phi * n}
        return {"heavy": heavy, "exact": exact, "candidates": set(exact)}
