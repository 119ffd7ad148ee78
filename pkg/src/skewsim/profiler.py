"""Runtime profiler: workload histogram, greedy helper planning, and
throughput monitoring.

Plan generation repeatedly assigns the next secondary PE to the primary
whose effective workload (observed count divided by one plus its helpers)
is largest, breaking ties toward the lowest primary index. Comparisons are
exact integer cross-products, never floating division, so tie-breaking is
deterministic.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


@dataclass
class WorkloadHistogram:
    counts: list
    window_cycles: int = 0


@dataclass
class SchedulingPlan:
    """assignments[i] is the primary PE helped by secondary PE M+i."""

    assignments: list = field(default_factory=list)


class Health(enum.Enum):
    HEALTHY = "healthy"
    DEGRADED = "degraded"


def new_partials(n_lanes: int, m: int) -> list:
    return [[0] * m for _ in range(n_lanes)]


def record_batch(partials: list, pe_ids) -> list:
    """Each lane's hist instance counts the primary id it saw this cycle."""
    for lane, pe_id in enumerate(pe_ids):
        partials[lane][pe_id] += 1
    return partials


def merge_partials(partials: list, window_cycles: int = 0) -> WorkloadHistogram:
    m = len(partials[0])
    counts = [sum(p[i] for p in partials) for i in range(m)]
    return WorkloadHistogram(counts, window_cycles)


def generate_plan(hist, x: int) -> SchedulingPlan:
    """Greedy helper assignment over the workload histogram."""
    counts = list(hist.counts) if isinstance(hist, WorkloadHistogram) else list(hist)
    m = len(counts)
    if x > m - 1:
        raise ValueError("x exceeds M-1")
    helpers = [0] * m
    assignments = []
    for _ in range(x):
        best = 0
        for r in range(1, m):
            # counts[r]/(1+helpers[r]) > counts[best]/(1+helpers[best])
            if counts[r] * (1 + helpers[best]) > counts[best] * (1 + helpers[r]):
                best = r
        helpers[best] += 1
        assignments.append(best)
    return SchedulingPlan(assignments)


@dataclass
class MonitorState:
    window: int
    threshold: float
    reference: float = 0.0  # best window throughput since the last epoch
    tick: int = 0
    samples: list = field(default_factory=list)

    def advance(self, cycles: int = 1) -> None:
        self.tick += cycles


def check_throughput(mon: MonitorState, processed_delta: int) -> Health:
    """Compare one window's throughput against the reference; strict
    less-than, so threshold 1.0 with steady throughput stays healthy."""
    rate = processed_delta / mon.window
    mon.samples.append(rate)
    if rate > mon.reference:
        mon.reference = rate
        return Health.HEALTHY
    if mon.threshold > 0.0 and rate < mon.threshold * mon.reference:
        return Health.DEGRADED
    return Health.HEALTHY
