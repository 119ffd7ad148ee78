"""PageRank over an edge stream, Q32.32 fixed point.

Each pass scatters rank(src)/outdeg(src) into per-vertex accumulators; the
destination vertex block selects the PE. Ranks for the next pass are
(1-d)/V + d * accum, all in integer fixed point, so results are bit-exact
regardless of helper count or epoch timing.
"""

from __future__ import annotations

import numpy as np

from .base import KIND_PR, AppError, AppFactory, AppInstance

ONE = 1 << 32  # Q32.32 unit


def damp_ranks(accum: np.ndarray, d_fp: int, vertices: int) -> np.ndarray:
    """rank = (1-d)/V + d * accum in Q32.32.

    d_fp * accum can exceed 63 bits, so the products go through Python
    integers instead of int64 arithmetic.
    """
    base = (ONE - d_fp) // vertices
    return np.fromiter((base + (d_fp * a) // ONE for a in accum.tolist()),
                       np.int64, count=len(accum))


class PRInstance(AppInstance):
    kind = KIND_PR

    def __init__(self, cfg, vertices: int, damping: float, iterations: int,
                 stream):
        super().__init__(cfg)
        m = cfg.m_pripe
        if vertices % m != 0:
            raise AppError("vertex count must be divisible by M")
        if iterations < 1:
            raise AppError("iterations must be >= 1")
        if len(stream) and (int(np.asarray(stream.keys).max()) >= vertices
                            or int(np.asarray(stream.values).max()) >= vertices):
            raise AppError("edge references a vertex >= V")
        self.vertices = vertices
        self.d_fp = int(damping * ONE)
        self.num_passes = iterations
        self.block = vertices // m
        self.params = [vertices, self.block]
        outdeg = np.bincount(np.asarray(stream.keys).astype(np.int64),
                             minlength=vertices).astype(np.int64)
        self.arrays["pr_outdeg"] = np.maximum(outdeg, 1)
        self.arrays["pr_rank"] = np.full(vertices, ONE // vertices, np.int64)
        self.arrays["pr_accum"] = np.zeros((cfg.num_pes, self.block), np.int64)

    def prepare(self, key, value):
        contrib = int(self.arrays["pr_rank"][key]) // int(self.arrays["pr_outdeg"][key])
        return value // self.block, contrib

    def _ranks_from_accum(self) -> np.ndarray:
        m = self.cfg.m_pripe
        merged = self.arrays["pr_accum"][:m].reshape(-1)  # blocks are contiguous
        return damp_ranks(merged, self.d_fp, self.vertices)

    def begin_pass(self, index):
        if index > 0:
            self.arrays["pr_rank"][:] = self._ranks_from_accum()
            self.arrays["pr_accum"][:] = 0

    def fold(self, helper, primary):
        acc = self.arrays["pr_accum"]
        acc[primary] += acc[helper]
        acc[helper] = 0

    def finalize(self, serving, total_tuples):
        self._fold_remaining(serving)
        return self._ranks_from_accum()

    def per_pe_entries(self):
        return self.block


class PRApp(AppFactory):
    name = "pr"

    def __init__(self, vertices: int, damping: float = 0.85, iterations: int = 5):
        self.vertices = vertices
        self.damping = damping
        self.iterations = iterations

    def instantiate(self, cfg, stream):
        inst = PRInstance(cfg, self.vertices, self.damping, self.iterations, stream)
        # helpers must be folded into the primaries before ranks are read
        return inst

    def reference(self, stream):
        v = self.vertices
        src = np.asarray(stream.keys).astype(np.int64)
        dst = np.asarray(stream.values).astype(np.int64)
        if len(src) and (src.max() >= v or dst.max() >= v):
            raise AppError("edge references a vertex >= V")
        outdeg = np.maximum(np.bincount(src, minlength=v), 1).astype(np.int64)
        d_fp = int(self.damping * ONE)
        rank = np.full(v, ONE // v, np.int64)
        for _ in range(self.iterations):
            accum = np.zeros(v, np.int64)
            np.add.at(accum, dst, rank[src] // outdeg[src])
            rank = damp_ranks(accum, d_fp, v)
        return rank
