"""Benchmark the compiled cycle kernel against the pure-Python fallback.

Runs the same workloads through both kernels, checks the outputs are
bit-identical, and reports wall-clock time per core.

Usage: python benchmarks/compare_cores.py [--n TUPLES]
"""

import argparse
import time

import numpy as np

from skewsim.apps import make_app
from skewsim.config import ArchConfig
from skewsim.datagen import gen_graph, gen_zipf
from skewsim.engine import HAS_COMPILED, run_simulation


def _equal(a, b) -> bool:
    if isinstance(a, dict):
        return set(a) == set(b) and all(_equal(a[k], b[k]) for k in a)
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    if isinstance(a, (set, frozenset)):
        return a == b
    if isinstance(a, (list, tuple)):
        return len(a) == len(b) and all(_equal(p, q) for p, q in zip(a, b))
    return a == b


def run_case(name, cfg, stream, factory):
    times = {}
    outputs = {}
    for core in ("python", "compiled"):
        t0 = time.perf_counter()
        metrics, result = run_simulation(cfg, stream, factory, core=core)
        times[core] = time.perf_counter() - t0
        outputs[core] = (metrics, result)
    mp, rp = outputs["python"]
    mc, rc = outputs["compiled"]
    same = (mp.total_cycles == mc.total_cycles
            and mp.stall_cycles == mc.stall_cycles
            and np.array_equal(mp.tuples_processed, mc.tuples_processed)
            and mp.reschedule_events == mc.reschedule_events
            and _equal(rp, rc))
    speedup = times["python"] / times["compiled"]
    print(f"{name:28s} python {times['python']:7.3f}s  "
          f"compiled {times['compiled']:7.3f}s  "
          f"speedup {speedup:5.1f}x  identical={same}")
    return same


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=200_000,
                        help="tuples per workload")
    args = parser.parse_args()
    if not HAS_COMPILED:
        print("compiled kernel is not built; nothing to compare")
        return 1

    n = args.n
    cases = [
        ("histo uniform x=0",
         ArchConfig(), gen_zipf(n, 0.0, 1 << 20, 1), make_app("histo")),
        ("histo zipf(2) x=15",
         ArchConfig(x_secpe=15), gen_zipf(n, 2.0, 1 << 20, 2),
         make_app("histo")),
        ("hll zipf(1.2) x=8",
         ArchConfig(x_secpe=8), gen_zipf(n, 1.2, 1 << 20, 3),
         make_app("hll")),
        ("hhd zipf(2) x=4",
         ArchConfig(x_secpe=4), gen_zipf(n, 2.0, 1 << 16, 4),
         make_app("hhd")),
        ("pr power-law x=7",
         ArchConfig(x_secpe=7),
         gen_graph(vertices=2048, avg_degree=max(1, n // 2048),
                   skew_exponent=1.5, seed=5),
         make_app("pr", vertices=2048, iterations=3)),
    ]
    ok = True
    for name, cfg, stream, factory in cases:
        ok &= run_case(name, cfg, stream, factory)
    if not ok:
        print("FAIL: kernels disagree")
        return 1
    print("all cases identical across cores")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
