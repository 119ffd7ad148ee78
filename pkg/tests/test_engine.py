import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewsim.apps import DPApp, HHDApp, HLLApp, HistoApp, PRApp, make_app
from skewsim.apps.dp import canonical_partitions
from skewsim.apps.base import reference_run
from skewsim.config import ArchConfig, ConfigError
from skewsim.datagen import TupleStream, gen_graph, gen_single_key, gen_zipf
from skewsim.engine import (HAS_COMPILED, SimulationError, advance_cycle,
                            fetch_batch, make_pipeline, run_simulation)

from helpers import results_equal

needs_compiled = pytest.mark.skipif(not HAS_COMPILED,
                                    reason="compiled kernel not built")


def test_fetch_batch_reads_interface_width():
    stream = gen_zipf(100, 0.0, 1 << 10, seed=0)
    cfg = ArchConfig(w_mem=64, w_tuple=8)
    batch, cursor = fetch_batch(stream, cfg, 0)
    assert len(batch) == 8
    assert cursor == 8


def test_fetch_batch_tail_and_exhaustion():
    stream = gen_zipf(3, 0.0, 1 << 10, seed=0)
    cfg = ArchConfig()
    batch, cursor = fetch_batch(stream, cfg, 0)
    assert len(batch) == 3
    batch, cursor = fetch_batch(stream, cfg, cursor)
    assert batch == []


def test_uniform_histogram_saturates_the_pipeline():
    stream = gen_zipf(100_000, 0.0, 1 << 20, seed=1)
    metrics, _ = run_simulation(ArchConfig(), stream, HistoApp())
    assert metrics.throughput == pytest.approx(8.0, rel=0.05)


def test_single_key_collapses_to_one_pe():
    stream = gen_single_key(50_000, 1 << 20, seed=2)
    metrics, _ = run_simulation(ArchConfig(), stream, HistoApp())
    assert metrics.throughput == pytest.approx(0.5, rel=0.02)
    assert np.count_nonzero(metrics.tuples_processed) == 1


def test_conservation_across_configs():
    stream = gen_zipf(20_000, 1.5, 1 << 16, seed=3)
    for m, x in ((4, 0), (8, 3), (16, 15)):
        cfg = ArchConfig(m_pripe=m, x_secpe=x, throughput_threshold=0.8,
                         monitor_window=256, reschedule_overhead=64)
        metrics, _ = run_simulation(cfg, stream, HistoApp())
        assert metrics.total_tuples == len(stream)


def test_determinism_bit_identical():
    stream = gen_zipf(15_000, 2.0, 1 << 16, seed=4)
    cfg = ArchConfig(x_secpe=6, throughput_threshold=0.8, monitor_window=256)
    runs = [run_simulation(cfg, stream, HLLApp()) for _ in range(2)]
    (m1, r1), (m2, r2) = runs
    assert m1.total_cycles == m2.total_cycles
    assert m1.stall_cycles == m2.stall_cycles
    assert np.array_equal(m1.tuples_processed, m2.tuples_processed)
    assert m1.initial_plans == m2.initial_plans
    assert m1.reschedule_events == m2.reschedule_events
    assert results_equal(r1, r2)


def test_throughput_never_exceeds_stage_bounds():
    for alpha, x in ((0.0, 0), (2.0, 4), (3.0, 15)):
        stream = gen_zipf(20_000, alpha, 1 << 16, seed=5)
        cfg = ArchConfig(x_secpe=x)
        metrics, _ = run_simulation(cfg, stream, HistoApp())
        fetch_bound = cfg.w_mem / cfg.w_tuple
        pe_bound = cfg.num_pes / cfg.ii_pripe
        assert metrics.throughput <= min(fetch_bound, pe_bound) + 1e-9


def test_channels_never_exceed_capacity():
    cfg = ArchConfig(m_pripe=4, x_secpe=3, channel_depth=8,
                     profiling_cycles=16, monitor_window=64)
    stream = gen_zipf(2000, 2.5, 1 << 12, seed=6)
    state, _ = make_pipeline(cfg, stream, HistoApp())
    while not state.done:
        advance_cycle(state)
        assert all(len(ch) <= cfg.channel_depth for ch in state.chans)


def test_advance_cycle_rejects_finished_runs():
    cfg = ArchConfig(m_pripe=4)
    stream = gen_zipf(64, 0.0, 1 << 8, seed=7)
    state, _ = make_pipeline(cfg, stream, HistoApp(num_bins=64))
    while not state.done:
        advance_cycle(state)
    with pytest.raises(SimulationError):
        advance_cycle(state)


def test_capacity_model_limits_buffer_size():
    cfg = ArchConfig(bram_capacity_c=1024)  # 64 entries per PE at M=16
    stream = gen_zipf(100, 0.0, 1 << 8, seed=8)
    with pytest.raises(ConfigError, match="capacity"):
        run_simulation(cfg, stream, HistoApp(num_bins=4096))


def test_primaries_keep_consuming_during_epochs():
    cfg = ArchConfig(m_pripe=4, x_secpe=3, throughput_threshold=0.9,
                     profiling_cycles=32, monitor_window=64,
                     reschedule_overhead=32, channel_depth=32)
    stream = gen_zipf(6000, 3.0, 1 << 12, seed=9)
    state, _ = make_pipeline(cfg, stream, HistoApp(num_bins=64))
    from skewsim.engine import _kernel_py as kp
    while not state.done:
        busy = [p for p in range(4)
                if state.chans[p] and state.cooldown[p] == 0]
        before = [state.proc[p] for p in busy]
        phase = state.phase
        advance_cycle(state)
        if phase in (kp.DRAINING, kp.OVERHEAD):
            for p, b in zip(busy, before):
                assert state.proc[p] == b + 1


@needs_compiled
@given(st.data())
@settings(max_examples=25, deadline=None)
def test_cores_agree_bit_for_bit(data):
    m = data.draw(st.sampled_from([4, 8, 16]))
    x = data.draw(st.integers(min_value=0, max_value=m - 1))
    alpha = data.draw(st.sampled_from([0.0, 1.0, 2.5]))
    threshold = data.draw(st.sampled_from([0.0, 0.8]))
    seed = data.draw(st.integers(min_value=0, max_value=99))
    cfg = ArchConfig(m_pripe=m, x_secpe=x, throughput_threshold=threshold,
                     profiling_cycles=64, monitor_window=128,
                     reschedule_overhead=64)
    stream = gen_zipf(4000, alpha, 1 << 14, seed=seed)
    app = HistoApp(num_bins=1024 if m != 16 else 4096)
    mp, rp = run_simulation(cfg, stream, app, core="python")
    mc, rc = run_simulation(cfg, stream, app, core="compiled")
    assert mp.total_cycles == mc.total_cycles
    assert mp.stall_cycles == mc.stall_cycles
    assert np.array_equal(mp.tuples_processed, mc.tuples_processed)
    assert mp.initial_plans == mc.initial_plans
    assert mp.reschedule_events == mc.reschedule_events
    assert mp.per_epoch_throughput == mc.per_epoch_throughput
    assert results_equal(rp, rc)


@needs_compiled
def test_cores_agree_for_every_app():
    cfg = ArchConfig(x_secpe=5, throughput_threshold=0.8,
                     profiling_cycles=64, monitor_window=128,
                     reschedule_overhead=64)
    cases = [
        (HistoApp(), gen_zipf(8000, 2.0, 1 << 14, seed=1)),
        (DPApp(), gen_zipf(8000, 1.2, 1 << 14, seed=2)),
        (HLLApp(), gen_zipf(8000, 0.5, 1 << 14, seed=3)),
        (HHDApp(), gen_zipf(8000, 2.2, 1 << 12, seed=4)),
        (PRApp(vertices=256, iterations=2),
         gen_graph(vertices=256, avg_degree=16, skew_exponent=1.5, seed=5)),
    ]
    for app, stream in cases:
        mp, rp = run_simulation(cfg, stream, app, core="python")
        mc, rc = run_simulation(cfg, stream, app, core="compiled")
        assert mp.total_cycles == mc.total_cycles
        assert results_equal(rp, rc)


def test_requesting_missing_compiled_core():
    if HAS_COMPILED:
        pytest.skip("compiled kernel present")
    stream = gen_zipf(100, 0.0, 1 << 8, seed=0)
    with pytest.raises(SimulationError):
        run_simulation(ArchConfig(), stream, HistoApp(), core="compiled")


def test_unknown_core_rejected():
    stream = gen_zipf(100, 0.0, 1 << 8, seed=0)
    with pytest.raises(ValueError, match="unknown core"):
        run_simulation(ArchConfig(), stream, HistoApp(), core="verilog")
