"""HyperLogLog cardinality estimation over murmur3-finalizer hashes.

Register j (top b hash bits) is owned by primary j mod M; each PE keeps
the max-rank register slice for its range and merging is element-wise max.
"""

from __future__ import annotations

import math

import numpy as np

from ..hashutil import MASK64, clz64_np, fmix64, fmix64_np
from .base import KIND_HLL, AppError, AppFactory, AppInstance


def _alpha(num_registers: int) -> float:
    if num_registers == 16:
        return 0.673
    if num_registers == 32:
        return 0.697
    if num_registers == 64:
        return 0.709
    return 0.7213 / (1.0 + 1.079 / num_registers)


def estimate_from_registers(regs: np.ndarray) -> float:
    """Standard HLL estimate with the linear-counting small-range branch."""
    nr = len(regs)
    inv_sum = float(np.sum(np.exp2(-regs.astype(np.float64))))
    raw = _alpha(nr) * nr * nr / inv_sum
    zeros = int(np.count_nonzero(regs == 0))
    if raw <= 2.5 * nr and zeros > 0:
        return nr * math.log(nr / zeros)
    return raw


def _rho_payloads(hashes: np.ndarray, b: int) -> tuple:
    """(register index, rank) arrays for an array of 64-bit hashes."""
    j = (hashes >> np.uint64(64 - b)).astype(np.int64)
    rem = (hashes << np.uint64(b)) & np.uint64(MASK64)
    rho = np.where(rem == 0, 64 - b + 1, clz64_np(rem) + 1).astype(np.int64)
    return j, rho


class HLLInstance(AppInstance):
    kind = KIND_HLL

    def __init__(self, cfg, num_registers: int, hash_seed: int):
        super().__init__(cfg)
        m = cfg.m_pripe
        if num_registers & (num_registers - 1) or num_registers < 16:
            raise AppError("num_registers must be a power of two >= 16")
        if num_registers % m != 0:
            raise AppError("num_registers must be divisible by M")
        self.nr = num_registers
        self.b = num_registers.bit_length() - 1
        self.hash_seed = hash_seed & MASK64
        self.params = [self.b, self.hash_seed]
        self.arrays["regs"] = np.zeros((cfg.num_pes, num_registers // m), np.uint8)

    def prepare(self, key, value):
        h = fmix64(key ^ self.hash_seed)
        j = h >> (64 - self.b)
        rem = (h << self.b) & MASK64
        rho = (64 - rem.bit_length() + 1) if rem else (64 - self.b + 1)
        m = self.cfg.m_pripe
        return j % m, ((j // m) << 8) | rho

    def fold(self, helper, primary):
        regs = self.arrays["regs"]
        np.maximum(regs[primary], regs[helper], out=regs[primary])
        regs[helper] = 0

    def finalize(self, serving, total_tuples):
        self._fold_remaining(serving)
        m = self.cfg.m_pripe
        merged = self.arrays["regs"][:m].T.reshape(-1).copy()  # regs[r, l] is j=l*m+r
        return {"registers": merged, "estimate": estimate_from_registers(merged)}

    def per_pe_entries(self):
        return self.nr // self.cfg.m_pripe


class HLLApp(AppFactory):
    name = "hll"

    def __init__(self, num_registers: int = 1 << 14, hash_seed: int = 0x9E3779B97F4A7C15):
        self.nr = num_registers
        self.hash_seed = hash_seed & MASK64

    def instantiate(self, cfg, stream):
        return HLLInstance(cfg, self.nr, self.hash_seed)

    def reference(self, stream):
        b = self.nr.bit_length() - 1
        hashes = fmix64_np(np.asarray(stream.keys) ^ np.uint64(self.hash_seed))
        j, rho = _rho_payloads(hashes, b)
        regs = np.zeros(self.nr, np.uint8)
        np.maximum.at(regs, j, rho.astype(np.uint8))
        return {"registers": regs, "estimate": estimate_from_registers(regs)}
