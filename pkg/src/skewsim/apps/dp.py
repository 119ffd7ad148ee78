"""Radix data partitioning: non-decomposable, each PE flushes full buffer
lines to its private output region; finalize stitches the regions together
per partition, ending with a partial-line flush."""

from __future__ import annotations

import numpy as np

from .base import KIND_DP, AppError, AppFactory, AppInstance


class DPInstance(AppInstance):
    kind = KIND_DP
    decomposable = False

    def __init__(self, cfg, fanout: int, buffer_line: int):
        super().__init__(cfg)
        m = cfg.m_pripe
        if fanout % m != 0:
            raise AppError("fanout must be divisible by M")
        if fanout & (fanout - 1):
            raise AppError("fanout must be a power of two (radix partitioning)")
        self.fanout = fanout
        self.line = buffer_line
        self.params = [fanout, buffer_line]
        parts_local = fanout // m
        self.arrays["dp_buf"] = np.zeros((cfg.num_pes, parts_local, 2 * buffer_line),
                                         np.uint64)
        self.arrays["dp_cnt"] = np.zeros((cfg.num_pes, parts_local), np.int32)
        # flushed lines: (global partition, pairs-array) in flush order
        self.aux["flushes"] = []

    def prepare(self, key, value):
        part = key & (self.fanout - 1)
        return part % self.cfg.m_pripe, part // self.cfg.m_pripe

    def flush(self, pe: int, local_part: int, primary: int) -> None:
        cnt = int(self.arrays["dp_cnt"][pe, local_part])
        if cnt == 0:
            return
        gpart = local_part * self.cfg.m_pripe + primary
        line = self.arrays["dp_buf"][pe, local_part, : 2 * cnt].copy()
        self.aux["flushes"].append((gpart, line))
        self.arrays["dp_cnt"][pe, local_part] = 0

    def fold(self, helper, primary):
        # Non-decomposable: the helper's region is already in global memory;
        # only partial lines need flushing before the helper is reassigned.
        for lp in range(self.fanout // self.cfg.m_pripe):
            self.flush(helper, lp, primary)

    def finalize(self, serving, total_tuples):
        self._fold_remaining(serving)
        for r in range(self.cfg.m_pripe):
            for lp in range(self.fanout // self.cfg.m_pripe):
                self.flush(r, lp, r)
        out = {p: [] for p in range(self.fanout)}
        for gpart, line in self.aux["flushes"]:
            out[gpart].append(line)
        return {
            p: (np.concatenate(chunks) if chunks else np.empty(0, np.uint64)).reshape(-1, 2)
            for p, chunks in out.items()
        }

    def per_pe_entries(self):
        return (self.fanout // self.cfg.m_pripe) * self.line


def canonical_partitions(result: dict) -> dict:
    """Sort each partition's pairs; canonical form for multiset equality."""
    canon = {}
    for p, pairs in result.items():
        arr = np.asarray(pairs, dtype=np.uint64).reshape(-1, 2)
        order = np.lexsort((arr[:, 1], arr[:, 0]))
        canon[p] = arr[order]
    return canon


class DPApp(AppFactory):
    name = "dp"

    def __init__(self, fanout: int = 64, buffer_line: int = 8):
        self.fanout = fanout
        self.line = buffer_line

    def instantiate(self, cfg, stream):
        return DPInstance(cfg, self.fanout, self.line)

    def reference(self, stream):
        keys = np.asarray(stream.keys)
        parts = (keys & np.uint64(self.fanout - 1)).astype(np.int64)
        pairs = np.stack([keys, np.asarray(stream.values)], axis=1)
        return {p: pairs[parts == p] for p in range(self.fanout)}
