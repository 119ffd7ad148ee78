"""Offline sizing and implementation selection.

Covers the balanced-pipeline PE counts, the tolerance-based secondary-PE
count over a sampled workload histogram, uniform dataset sampling, and the
buffer capacity model trading distinct-data capacity against helper count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


class AnalyzerError(ValueError):
    pass


@dataclass(frozen=True)
class AnalyzerParams:
    tolerance: float = 0.01
    sample_fraction: float = 0.001
    sample_count: int = 25_600
    seed: int = 0


def pe_counts(ii_prepe: int, ii_pripe: int, w_mem: int, w_tuple: int) -> tuple:
    """(N, M) forming a balanced pipeline at the memory fetch rate."""
    if min(ii_prepe, ii_pripe, w_mem, w_tuple) < 1:
        raise AnalyzerError("all pipeline parameters must be >= 1")
    if w_mem % w_tuple != 0:
        raise AnalyzerError("w_tuple must divide w_mem")
    rate = w_mem // w_tuple
    return ii_prepe * rate, ii_pripe * rate


def bucket_workloads(keys, m: int, dest_fn=None) -> list:
    """Per-primary sampled workloads; default destination is key mod M."""
    if dest_fn is None:
        counts = np.bincount(np.asarray(keys, dtype=np.uint64) % np.uint64(m),
                             minlength=m)
        return [int(c) for c in counts]
    workloads = [0] * m
    for k in keys:
        workloads[dest_fn(int(k))] += 1
    return workloads


def secpe_count_from_workloads(workloads, t: float) -> int:
    """Tolerance-based helper count, clamped into [0, M-1].

    X = sum_i ceil(|M * w_i / sum(w) - T|) - M. The per-term value is kept
    as an exact fraction so the ceiling never wobbles on float rounding.
    """
    m = len(workloads)
    total = sum(workloads)
    if total <= 0:
        raise AnalyzerError("empty sample")
    if not 0.0 < t < 1.0:
        raise AnalyzerError("tolerance must be in (0, 1)")
    tol = Fraction(t)
    acc = 0
    for w in workloads:
        acc += math.ceil(abs(Fraction(m * int(w), total) - tol))
    return max(0, min(m - 1, acc - m))


def select_secpe_count(samples, m: int, t: float, dest_fn=None) -> int:
    if len(samples) == 0:
        raise AnalyzerError("empty sample")
    return secpe_count_from_workloads(bucket_workloads(samples, m, dest_fn), t)


def sample_dataset(keys, params: AnalyzerParams) -> np.ndarray:
    """Uniform sample without replacement, deterministic by seed."""
    keys = np.asarray(keys)
    n = len(keys)
    size = min(params.sample_count, math.ceil(params.sample_fraction * n), n)
    if size >= n:
        return keys.copy()
    rng = np.random.default_rng(params.seed)
    idx = rng.choice(n, size=size, replace=False)
    return keys[idx]


def bram_capacity(m: int, x: int, c: int) -> int:
    """Distinct-data capacity left once X helpers replicate primary ranges."""
    if not 0 <= x <= m - 1:
        raise AnalyzerError("x must be in [0, m-1]")
    return m * c // (m + x)


def select_implementation(keys, m: int, t: float, mode: str = "offline",
                          params: AnalyzerParams | None = None,
                          c: int = 1 << 20, dest_fn=None) -> tuple:
    """Choose X (and its buffer capacity) for a dataset.

    Offline samples the stream and applies the tolerance rule; online has
    no prior knowledge of the input and takes the worst case X = M-1.
    """
    if mode == "online":
        x = m - 1
    elif mode == "offline":
        params = params or AnalyzerParams(tolerance=t)
        sample = sample_dataset(keys, params)
        x = select_secpe_count(sample, m, t, dest_fn)
    else:
        raise AnalyzerError(f"unknown mode {mode!r}")
    return x, bram_capacity(m, x, c)
