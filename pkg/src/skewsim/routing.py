"""Combiner/decoder/filter data routing over bounded destination channels.

Up to N prepared tuples are dispatched per cycle. Each destination owns a
mask-indexed decode step: bit i of the mask is set iff lane i carries a
tuple for this destination, and a preset table maps the mask to the lane
positions to extract. A cycle either places every tuple of the batch or
stalls atomically.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass

from .types import RoutedTuple


class RoutingError(ValueError):
    pass


@dataclass(frozen=True)
class DecodeEntry:
    count: int
    positions: tuple


@dataclass
class DecodeTable:
    lane_count: int
    entries: list  # indexed by mask code


class RouteResult(enum.Enum):
    ACCEPTED = "accepted"
    STALLED = "stalled"


def build_decode_table(n: int) -> DecodeTable:
    """Preset table over all 2^n mask codes."""
    if not 1 <= n <= 16:
        raise RoutingError("lane count must be in [1, 16]")
    entries = []
    for mask in range(1 << n):
        positions = tuple(i for i in range(n) if mask >> i & 1)
        entries.append(DecodeEntry(len(positions), positions))
    return DecodeTable(n, entries)


def decode(table: DecodeTable, batch, pe_id: int):
    """Extract, in lane order, the tuples of the batch destined for pe_id."""
    if len(batch) > table.lane_count:
        raise RoutingError("batch wider than decode table lanes")
    mask = 0
    for i, rt in enumerate(batch):
        if rt.dst == pe_id:
            mask |= 1 << i
    entry = table.entries[mask]
    return [batch[i] for i in entry.positions]


class RouterState:
    def __init__(self, n_lanes: int, num_channels: int, capacity: int):
        self.table = build_decode_table(n_lanes)
        self.channels = [deque() for _ in range(num_channels)]
        self.capacity = capacity
        self.stall_cycles = 0
        self.pending = None  # batch replayed on stall


def route_cycle(state: RouterState, batch=None) -> RouteResult:
    """Attempt to place a batch (or the pending stalled batch) into the
    destination channels. All-or-nothing: if any destination lacks room for
    its matched tuples, no channel is modified."""
    if batch is not None:
        if state.pending is not None:
            raise RoutingError("router already holds a stalled batch")
        state.pending = list(batch)
    if not state.pending:
        state.pending = None
        return RouteResult.ACCEPTED

    matched = {}
    for rt in state.pending:
        matched.setdefault(rt.dst, 0)
        matched[rt.dst] += 1
    for dst, need in matched.items():
        if len(state.channels[dst]) + need > state.capacity:
            state.stall_cycles += 1
            return RouteResult.STALLED
    for dst in matched:
        for rt in decode(state.table, state.pending, dst):
            state.channels[dst].append(rt)
    state.pending = None
    return RouteResult.ACCEPTED
