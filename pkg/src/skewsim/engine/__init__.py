"""Simulation driver and kernel selection.

The hot cycle loop exists twice: a Cython extension (built at install
time) and a pure-Python fallback with identical semantics. The compiled
kernel is picked automatically when present; `core=` forces one side,
which the equivalence tests and the benchmark rely on.
"""

from __future__ import annotations

import numpy as np

from ..config import ArchConfig, ConfigError, validate_config
from ..profiler import generate_plan
from ..types import SimMetrics
from ._kernel_py import PipelineState
from ._kernel_py import run_kernel as _run_py
from .job import KernelJob, SimulationError

try:
    from ._kernel_cy import run_kernel as _run_cy

    HAS_COMPILED = True
except ImportError:  # extension not built; interpret the fallback
    _run_cy = None
    HAS_COMPILED = False


def active_core() -> str:
    return "compiled" if HAS_COMPILED else "python"


def _kernel_for(core: str | None):
    if core in (None, "auto"):
        return _run_cy if HAS_COMPILED else _run_py
    if core == "compiled":
        if not HAS_COMPILED:
            raise SimulationError("compiled kernel is not available")
        return _run_cy
    if core == "python":
        return _run_py
    raise ValueError(f"unknown core {core!r}")


def fetch_batch(stream, cfg: ArchConfig, cursor: int = 0) -> tuple:
    """Read up to w_mem/w_tuple tuples at the cursor; returns
    (list of (key, value), new cursor)."""
    batch = cfg.batch_size
    end = min(cursor + batch, len(stream))
    pairs = list(zip(stream.keys[cursor:end].tolist(),
                     stream.values[cursor:end].tolist()))
    return pairs, end


def run_simulation(cfg: ArchConfig, stream, app_factory, core: str | None = None):
    """Run one application over one stream; returns (SimMetrics, result)."""
    cfg = validate_config(cfg)
    app = app_factory.instantiate(cfg, stream)
    per_pe_capacity = cfg.bram_capacity_c // cfg.num_pes
    if app.per_pe_entries() > per_pe_capacity:
        raise ConfigError(
            f"per-PE buffer of {app.per_pe_entries()} entries exceeds the "
            f"capacity model's {per_pe_capacity} (C={cfg.bram_capacity_c}, "
            f"M+X={cfg.num_pes})")
    kernel = _kernel_for(core)
    plan_fn = lambda counts, x: generate_plan(counts, x).assignments  # noqa: E731

    metrics = SimMetrics(tuples_processed=np.zeros(cfg.num_pes, np.int64))
    job = None
    for pass_index in range(app.num_passes):
        app.begin_pass(pass_index)
        cycle_base = metrics.total_cycles
        job = KernelJob(cfg, app, stream.keys, stream.values, plan_fn, app.fold)
        kernel(job)
        metrics.total_cycles += job.out_cycles
        metrics.stall_cycles += job.out_stalls
        metrics.tuples_processed += job.processed
        metrics.per_epoch_throughput.extend(job.out_samples)
        for cyc, plan, from_epoch in job.out_plans:
            target = metrics.reschedule_events if from_epoch else metrics.initial_plans
            target.append((cycle_base + cyc, plan))
        # merge helper state before ranks (or the next pass) read it
        app._fold_remaining(job.serving)

    expected = len(stream) * app.num_passes
    if metrics.total_tuples != expected:
        raise SimulationError(
            f"conservation violated: processed {metrics.total_tuples} "
            f"of {expected} tuples")
    metrics.throughput = (metrics.total_tuples / metrics.total_cycles
                          if metrics.total_cycles else 0.0)
    result = app.finalize(job.serving if job is not None
                          else np.zeros(cfg.num_pes, np.int32), len(stream))
    return metrics, result


def advance_cycle(state: PipelineState) -> None:
    """Advance a stepwise (pure-Python) pipeline by one cycle."""
    if state.done:
        raise SimulationError("simulation already finished")
    state.step()


def make_pipeline(cfg: ArchConfig, stream, app_factory) -> tuple:
    """Stepwise pipeline for tests and inspection: (state, app instance)."""
    cfg = validate_config(cfg)
    app = app_factory.instantiate(cfg, stream)
    plan_fn = lambda counts, x: generate_plan(counts, x).assignments  # noqa: E731
    job = KernelJob(cfg, app, stream.keys, stream.values, plan_fn, app.fold)
    return PipelineState(job), app
