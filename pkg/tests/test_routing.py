import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewsim.routing import (DecodeEntry, RouterState, RouteResult,
                             RoutingError, build_decode_table, decode,
                             route_cycle)
from skewsim.types import RoutedTuple, TupleRecord


def _batch(dsts):
    return [RoutedTuple(TupleRecord(key=i, value=i), dst=d)
            for i, d in enumerate(dsts)]


def test_two_lane_table_is_exact():
    table = build_decode_table(2)
    assert table.entries[0b00] == DecodeEntry(0, ())
    assert table.entries[0b01] == DecodeEntry(1, (0,))
    assert table.entries[0b10] == DecodeEntry(1, (1,))
    assert table.entries[0b11] == DecodeEntry(2, (0, 1))


def test_four_lane_mask_0101():
    table = build_decode_table(4)
    assert table.entries[0b0101] == DecodeEntry(2, (0, 2))


def test_all_masks_match_popcount_up_to_8_lanes():
    for n in range(1, 9):
        table = build_decode_table(n)
        assert len(table.entries) == 1 << n
        for mask, entry in enumerate(table.entries):
            assert entry.count == bin(mask).count("1")
            assert entry.positions == tuple(i for i in range(n)
                                            if mask >> i & 1)


@pytest.mark.parametrize("n", [0, 17, -1])
def test_lane_count_bounds(n):
    with pytest.raises(RoutingError):
        build_decode_table(n)


def test_decode_extracts_matching_lanes_in_order():
    table = build_decode_table(4)
    batch = _batch([2, 0, 2, 1])
    out = decode(table, batch, pe_id=2)
    assert [rt.tuple.key for rt in out] == [0, 2]


def test_decode_no_match_is_empty():
    table = build_decode_table(4)
    assert decode(table, _batch([2, 0, 2, 1]), pe_id=7) == []


def test_decode_full_match_preserves_lane_order():
    table = build_decode_table(4)
    out = decode(table, _batch([3, 3, 3, 3]), pe_id=3)
    assert [rt.tuple.key for rt in out] == [0, 1, 2, 3]


def test_decode_rejects_oversized_batch():
    table = build_decode_table(2)
    with pytest.raises(RoutingError, match="wider"):
        decode(table, _batch([0, 1, 0]), pe_id=0)


def test_route_spread_batch_accepted():
    state = RouterState(n_lanes=8, num_channels=8, capacity=4)
    assert route_cycle(state, _batch(list(range(8)))) is RouteResult.ACCEPTED
    assert all(len(ch) == 1 for ch in state.channels)


def test_route_stall_is_atomic():
    state = RouterState(n_lanes=8, num_channels=8, capacity=8)
    for _ in range(5):
        state.channels[5].append(None)
    before = [len(ch) for ch in state.channels]
    assert route_cycle(state, _batch([5] * 8)) is RouteResult.STALLED
    assert [len(ch) for ch in state.channels] == before
    assert state.stall_cycles == 1


def test_stalled_batch_replays_until_accepted():
    state = RouterState(n_lanes=4, num_channels=4, capacity=4)
    state.channels[1].extend([None, None, None])
    assert route_cycle(state, _batch([1, 1, 1, 1])) is RouteResult.STALLED
    with pytest.raises(RoutingError, match="already holds"):
        route_cycle(state, _batch([0]))
    state.channels[1].clear()
    assert route_cycle(state) is RouteResult.ACCEPTED
    assert len(state.channels[1]) == 4


@given(st.lists(st.integers(min_value=0, max_value=15),
                min_size=0, max_size=16))
@settings(max_examples=200)
def test_decode_partitions_every_batch(dsts):
    table = build_decode_table(16)
    batch = _batch(dsts)
    routed = []
    for p in range(16):
        routed.extend(decode(table, batch, p))
    assert sorted(rt.tuple.key for rt in routed) == list(range(len(batch)))


@given(st.lists(st.integers(min_value=0, max_value=7),
                min_size=1, max_size=8),
       st.integers(min_value=1, max_value=4))
@settings(max_examples=200)
def test_route_cycle_never_loses_or_duplicates(dsts, capacity):
    state = RouterState(n_lanes=8, num_channels=8, capacity=capacity)
    result = route_cycle(state, _batch(dsts))
    if result is RouteResult.ACCEPTED:
        keys = sorted(rt.tuple.key for ch in state.channels for rt in ch)
        assert keys == list(range(len(dsts)))
        assert all(len(ch) <= capacity for ch in state.channels)
    else:
        assert all(len(ch) == 0 for ch in state.channels)
        assert state.pending is not None


def test_decode_table_matches_naive_filter_randomized():
    import random
    rng = random.Random(1234)
    table = build_decode_table(16)
    for _ in range(200):
        batch = _batch([rng.randrange(16) for _ in range(16)])
        for p in range(16):
            naive = [rt for rt in batch if rt.dst == p]
            assert decode(table, batch, p) == naive
