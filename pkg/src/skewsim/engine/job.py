"""Kernel job: the flat state shared by the pure-Python and compiled
cycle kernels. The engine wrapper builds one job per pass and reads the
outputs back; both kernels mutate the same numpy arrays in place."""

from __future__ import annotations

import numpy as np

from ..apps.base import KIND_DP, KIND_HHD, KIND_HLL, KIND_HISTO, KIND_PR

_DUMMY_I64_2D = np.zeros((1, 1), np.int64)
_DUMMY_U64_3D = np.zeros((1, 1, 1), np.uint64)
_DUMMY_I32_2D = np.zeros((1, 1), np.int32)
_DUMMY_U8_2D = np.zeros((1, 1), np.uint8)
_DUMMY_I64_3D = np.zeros((1, 1, 1), np.int64)
_DUMMY_U64_1D = np.zeros(1, np.uint64)
_DUMMY_I64_1D = np.zeros(1, np.int64)


class KernelJob:
    def __init__(self, cfg, app, keys: np.ndarray, vals: np.ndarray,
                 plan_fn, fold_fn):
        self.m = cfg.m_pripe
        self.x = cfg.x_secpe
        self.n_lanes = cfg.n_prepe
        self.batch_size = cfg.batch_size
        self.ii_prepe = cfg.ii_prepe
        self.ii_pripe = cfg.ii_pripe
        self.channel_depth = cfg.channel_depth
        self.profiling_cycles = cfg.profiling_cycles
        self.monitor_window = cfg.monitor_window
        self.threshold = cfg.throughput_threshold
        self.reschedule_overhead = cfg.reschedule_overhead

        self.keys = np.ascontiguousarray(keys, np.uint64)
        self.vals = np.ascontiguousarray(vals, np.uint64)
        self.plan_fn = plan_fn
        self.fold_fn = fold_fn

        self.kind = app.kind
        arr = app.arrays
        # Application parameters (zeros when unused by the kind).
        self.nb = self.fanout = self.line = 0
        self.hll_b = self.hll_seed = 0
        self.hhd_d = self.hhd_w = 0
        self.pr_block = 0
        if app.kind == KIND_HISTO:
            self.nb = app.params[0]
        elif app.kind == KIND_DP:
            self.fanout, self.line = app.params
        elif app.kind == KIND_HLL:
            self.hll_b, self.hll_seed = app.params
        elif app.kind == KIND_HHD:
            self.hhd_d, self.hhd_w = app.params
        elif app.kind == KIND_PR:
            self.pr_block = app.params[1]

        self.bins = arr.get("bins", _DUMMY_I64_2D)
        self.dp_buf = arr.get("dp_buf", _DUMMY_U64_3D)
        self.dp_cnt = arr.get("dp_cnt", _DUMMY_I32_2D)
        self.regs = arr.get("regs", _DUMMY_U8_2D)
        self.sketch = arr.get("sketch", _DUMMY_I64_3D)
        self.hhd_a = arr.get("hhd_a", _DUMMY_U64_1D)
        self.hhd_b = arr.get("hhd_b", _DUMMY_U64_1D)
        self.pr_rank = arr.get("pr_rank", _DUMMY_I64_1D)
        self.pr_outdeg = arr.get("pr_outdeg", _DUMMY_I64_1D)
        self.pr_accum = arr.get("pr_accum", _DUMMY_I64_2D)
        self.candidates = app.aux.get("candidates")
        self.flushes = app.aux.get("flushes")

        num_pes = self.m + self.x
        self.processed = np.zeros(num_pes, np.int64)
        self.serving = np.full(num_pes, -1, np.int32)
        self.serving[: self.m] = np.arange(self.m, dtype=np.int32)

        # outputs
        self.out_cycles = 0
        self.out_stalls = 0
        self.out_samples: list = []   # per monitor window, tuples/cycle
        self.out_plans: list = []     # (cycle, plan tuple, fired_by_epoch)


class SimulationError(RuntimeError):
    pass
