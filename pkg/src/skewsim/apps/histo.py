"""Histogram building: count tuples per bin, bins interleaved across PEs.

Bin b belongs to primary b mod M, which for power-of-two M reproduces the
"low key bits pick the PE" routing rule (key 0x13 with M=16 routes to PE 3).
"""

from __future__ import annotations

import numpy as np

from .base import KIND_HISTO, AppError, AppFactory, AppInstance


class HistoInstance(AppInstance):
    kind = KIND_HISTO

    def __init__(self, cfg, num_bins: int):
        super().__init__(cfg)
        m = cfg.m_pripe
        if num_bins % m != 0:
            raise AppError("num_bins must be divisible by M")
        self.num_bins = num_bins
        self.params = [num_bins]
        self.arrays["bins"] = np.zeros((cfg.num_pes, num_bins // m), np.int64)

    def prepare(self, key, value):
        b = key % self.num_bins
        return b % self.cfg.m_pripe, b // self.cfg.m_pripe

    def fold(self, helper, primary):
        bins = self.arrays["bins"]
        bins[primary] += bins[helper]
        bins[helper] = 0

    def finalize(self, serving, total_tuples):
        self._fold_remaining(serving)
        m = self.cfg.m_pripe
        # bins[r, l] holds bin l*m + r
        return self.arrays["bins"][:m].T.reshape(-1).copy()

    def per_pe_entries(self):
        return self.num_bins // self.cfg.m_pripe


class HistoApp(AppFactory):
    name = "histo"

    def __init__(self, num_bins: int = 4096):
        self.num_bins = num_bins

    def instantiate(self, cfg, stream):
        return HistoInstance(cfg, self.num_bins)

    def reference(self, stream):
        bins = np.asarray(stream.keys) % np.uint64(self.num_bins)
        return np.bincount(bins.astype(np.int64), minlength=self.num_bins)
