"""Mapping table that redirects primary-PE destinations to secondary PEs.

The table has M rows and X+1 columns. Row r starts filled with r; plan
pairs append secondary PE ids to the row of the primary they help. Lookups
rotate round-robin over the first counters[r] entries of row r.
"""

from __future__ import annotations

from collections import deque


class MappingError(ValueError):
    pass


class MappingState:
    def __init__(self, m: int, x: int):
        self.m = m
        self.x = x
        self.table = [[r] * (x + 1) for r in range(m)]
        self.counters = [1] * m
        self.cursors = [0] * m
        self.pending = deque()  # plan pairs waiting to be applied
        self._placed = set()    # secondary ids already in the table

    def snapshot_row(self, r: int) -> list:
        return self.table[r][: self.counters[r]]


def init_mapping(m: int, x: int) -> MappingState:
    if m < 1 or x < 0 or x > m - 1:
        raise MappingError("init_mapping requires m >= 1 and 0 <= x <= m-1")
    return MappingState(m, x)


def apply_plan_pair(state: MappingState, secpe_id: int, pripe_id: int) -> MappingState:
    """Write one 'secondary -> primary' pair into the table."""
    if not state.m <= secpe_id < state.m + state.x:
        raise MappingError(f"secpe_id {secpe_id} out of range [{state.m}, {state.m + state.x})")
    if not 0 <= pripe_id < state.m:
        raise MappingError(f"pripe_id {pripe_id} out of range [0, {state.m})")
    if secpe_id in state._placed:
        raise MappingError("secondary PE already placed")
    if state.counters[pripe_id] > state.x:
        raise MappingError("row overflow")
    state.table[pripe_id][state.counters[pripe_id]] = secpe_id
    state.counters[pripe_id] += 1
    state._placed.add(secpe_id)
    return state


def redirect(state: MappingState, pripe_id: int) -> int:
    """Return the next destination for a tuple bound for pripe_id and
    advance the row's round-robin cursor."""
    c = state.counters[pripe_id]
    dst = state.table[pripe_id][state.cursors[pripe_id]]
    state.cursors[pripe_id] = (state.cursors[pripe_id] + 1) % c
    return dst


def reset_mapping(state: MappingState) -> MappingState:
    """Restore the identity mapping; no tuple is routed to a secondary PE
    until a new plan is applied."""
    for r in range(state.m):
        for c in range(state.x + 1):
            state.table[r][c] = r
        state.counters[r] = 1
        state.cursors[r] = 0
    state.pending.clear()
    state._placed.clear()
    return state


def queue_plan(state: MappingState, assignments) -> None:
    """Queue a scheduling plan; pairs are applied one per cycle."""
    for i, pripe_id in enumerate(assignments):
        state.pending.append((state.m + i, pripe_id))


def step_pending(state: MappingState) -> bool:
    """Apply at most one queued plan pair; returns True if one was applied."""
    if not state.pending:
        return False
    secpe_id, pripe_id = state.pending.popleft()
    apply_plan_pair(state, secpe_id, pripe_id)
    return True
