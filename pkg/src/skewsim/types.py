"""Shared record and metrics types."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class TupleRecord:
    """One key/value pair flowing through the pipeline."""

    key: int
    value: int = 0


@dataclass
class RoutedTuple:
    """A tuple together with its destination PE index."""

    tuple: TupleRecord
    dst: int


@dataclass
class SimMetrics:
    """Measured quantities of one simulation run."""

    total_cycles: int = 0
    tuples_processed: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    throughput: float = 0.0
    stall_cycles: int = 0
    # Plans installed by rescheduling epochs, as (cycle, plan) pairs.
    reschedule_events: list = field(default_factory=list)
    # Plans installed by the startup profiling window of each pass.
    initial_plans: list = field(default_factory=list)
    # One throughput sample per monitor window, in tuples/cycle.
    per_epoch_throughput: list = field(default_factory=list)

    @property
    def total_tuples(self) -> int:
        return int(self.tuples_processed.sum())
