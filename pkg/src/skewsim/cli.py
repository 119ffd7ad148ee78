"""Command-line front end: dataset generation, simulation, sizing
analysis, parameter sweeps, and report tables (CSV)."""

from __future__ import annotations

import argparse
import csv
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .analyzer import (AnalyzerError, AnalyzerParams, bucket_workloads,
                       sample_dataset, select_implementation)
from .apps import AppError, make_app
from .config import ArchConfig, ConfigError, load_config, validate_config
from .datagen import (DatasetError, gen_evolving, gen_graph, gen_single_key,
                      gen_zipf, load_edge_list, load_tuples, save_edge_list,
                      save_tuples)
from .engine import SimulationError, active_core, run_simulation

SWEEP_HEADER = ["app", "alpha", "m", "x", "seed", "cycles", "tuples",
                "throughput", "stalls", "reschedules"]


def _config_from_args(args) -> ArchConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else ArchConfig()
    overrides = {}
    for flag, field in (("m", "m_pripe"), ("x", "x_secpe"), ("seed", "seed"),
                        ("threshold", "throughput_threshold"),
                        ("window", "monitor_window"),
                        ("profiling", "profiling_cycles"),
                        ("overhead", "reschedule_overhead")):
        val = getattr(args, flag, None)
        if val is not None:
            overrides[field] = val
    return validate_config(cfg.replace(**overrides)) if overrides else validate_config(cfg)


def _app_factory(name: str, vertices: int | None, iterations: int | None):
    kwargs = {}
    if name == "pr":
        if vertices is None:
            raise AppError("pr requires --vertices")
        kwargs["vertices"] = vertices
        if iterations is not None:
            kwargs["iterations"] = iterations
    return make_app(name, **kwargs)


def _load_dataset(path: str, app: str, vertices: int | None):
    if app == "pr":
        return load_edge_list(path, vertices)
    return load_tuples(path)


def cmd_generate(args) -> int:
    kind = args.kind
    if kind == "zipf":
        stream = gen_zipf(args.n, args.alpha, args.domain, args.seed)
    elif kind == "single":
        stream = gen_single_key(args.n, args.domain, args.seed)
    elif kind == "evolving":
        seeds = [int(s) for s in args.seeds.split(",")]
        stream = gen_evolving(args.n, args.alpha, args.interval, seeds)
    elif kind == "graph":
        stream = gen_graph(args.vertices, args.degree, args.alpha, args.seed)
    else:
        raise DatasetError(f"unknown dataset kind {kind!r}")
    if kind == "graph":
        save_edge_list(stream, args.out)
    else:
        save_tuples(stream, args.out)
    print(f"wrote {len(stream)} tuples to {args.out}")
    return 0


def _metrics_row(app, alpha, cfg, metrics) -> list:
    return [app, f"{alpha:g}", cfg.m_pripe, cfg.x_secpe, cfg.seed,
            metrics.total_cycles, int(metrics.total_tuples),
            f"{metrics.throughput:.6f}", metrics.stall_cycles,
            len(metrics.reschedule_events)]


def cmd_simulate(args) -> int:
    cfg = _config_from_args(args)
    stream = _load_dataset(args.dataset, args.app, args.vertices)
    factory = _app_factory(args.app, args.vertices, args.iterations)
    metrics, _ = run_simulation(cfg, stream, factory, core=args.core)
    row = _metrics_row(args.app, args.alpha or 0.0, cfg, metrics)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(SWEEP_HEADER)
            w.writerow(row)
    print("core:", active_core() if args.core in (None, "auto") else args.core)
    for name, val in zip(SWEEP_HEADER, row):
        print(f"{name}: {val}")
    return 0


def cmd_analyze(args) -> int:
    cfg = _config_from_args(args)
    stream = _load_dataset(args.dataset, args.app, args.vertices)
    params = AnalyzerParams(tolerance=args.tolerance, seed=cfg.seed)
    x, capacity = select_implementation(
        stream.keys, cfg.m_pripe, args.tolerance, mode=args.mode,
        params=params, c=cfg.bram_capacity_c)
    print(f"x: {x}")
    print(f"capacity: {capacity}")
    sample = sample_dataset(stream.keys, params)
    writer = csv.writer(sys.stdout)
    writer.writerow(["pe", "sampled_tuples"])
    for pe, load in enumerate(bucket_workloads(sample, cfg.m_pripe)):
        writer.writerow([pe, load])
    return 0


def _sweep_entry(entry) -> list:
    app, alpha, m, x, seed, n, vertices, iterations, core = entry
    cfg = validate_config(ArchConfig(m_pripe=m, x_secpe=x, seed=seed))
    if app == "pr":
        stream = gen_graph(vertices, max(1, n // vertices), alpha, seed)
        factory = make_app("pr", vertices=vertices,
                           iterations=iterations or 5)
    else:
        stream = gen_zipf(n, alpha, 1 << 20, seed)
        factory = make_app(app)
    metrics, _ = run_simulation(cfg, stream, factory, core=core)
    return _metrics_row(app, alpha, cfg, metrics)


def _parse_grid(text: str, cast):
    try:
        return [cast(tok) for tok in text.split(",") if tok != ""]
    except ValueError as exc:
        raise ConfigError(f"bad grid value in {text!r}: {exc}") from None


def cmd_sweep(args) -> int:
    alphas = _parse_grid(args.alphas, float)
    xs = _parse_grid(args.xs, int)
    if not alphas or not xs:
        raise ConfigError("sweep grid is empty")
    entries = [(args.app, alpha, args.m, x, args.seed, args.n,
                args.vertices, args.iterations, args.core)
               for alpha in alphas for x in xs]
    threads = int(os.environ.get("SKEWSIM_THREADS", "1"))
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_sweep_entry, entries))
    else:
        rows = [_sweep_entry(e) for e in entries]
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(SWEEP_HEADER)
        w.writerows(rows)
    finally:
        if args.out:
            out.close()
    if args.out:
        print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def cmd_report(args) -> int:
    if args.mode == "heatmap":
        return _report_heatmap(args)
    if args.mode == "speedup":
        return _report_speedup(args)
    raise ConfigError(f"unknown report mode {args.mode!r}")


def _per_pe_workload(alpha: float, args) -> np.ndarray:
    cfg = validate_config(ArchConfig(m_pripe=args.m, x_secpe=0, seed=args.seed))
    stream = gen_zipf(args.n, alpha, 1 << 20, args.seed)
    metrics, _ = run_simulation(cfg, stream, make_app(args.app), core=args.core)
    return metrics.tuples_processed[:args.m].astype(np.float64)


def _report_heatmap(args) -> int:
    """Per-PE workload of each skewed run divided by the uniform run."""
    alphas = _parse_grid(args.alphas, float)
    baseline = _per_pe_workload(0.0, args)
    baseline[baseline == 0] = 1.0
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(["alpha"] + [f"pe{p}" for p in range(args.m)])
        for alpha in alphas:
            ratios = _per_pe_workload(alpha, args) / baseline
            w.writerow([f"{alpha:g}"] + [f"{r:.4f}" for r in ratios])
    finally:
        if args.out:
            out.close()
    return 0


def _report_speedup(args) -> int:
    """Throughput of each sweep row over its alpha's x=0 row."""
    if not args.sweep:
        raise ConfigError("report --mode speedup requires --sweep CSV")
    with open(args.sweep, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != SWEEP_HEADER:
            raise ConfigError(f"{args.sweep} is not a sweep CSV")
        rows = list(reader)
    base = {}
    for row in rows:
        if int(row["x"]) == 0:
            base[(row["app"], row["alpha"])] = float(row["throughput"])
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(["app", "alpha", "x", "throughput", "speedup"])
        for row in rows:
            key = (row["app"], row["alpha"])
            if key not in base:
                raise ConfigError(
                    f"no x=0 baseline for app={key[0]} alpha={key[1]}")
            ratio = float(row["throughput"]) / base[key] if base[key] else 0.0
            w.writerow([row["app"], row["alpha"], row["x"],
                        row["throughput"], f"{ratio:.4f}"])
    finally:
        if args.out:
            out.close()
    return 0


def _add_common(p):
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--m", type=int, help="primary PE count")
    p.add_argument("--x", type=int, help="secondary PE count")
    p.add_argument("--seed", type=int, help="random seed")
    p.add_argument("--out", help="output path")
    p.add_argument("--core", choices=["auto", "python", "compiled"],
                   default=None, help="simulation kernel to use")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skewsim",
        description="Skew-oblivious streaming-pipeline simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a dataset file")
    g.add_argument("--kind", required=True,
                   choices=["zipf", "single", "evolving", "graph"])
    g.add_argument("--n", type=int, default=1_000_000)
    g.add_argument("--alpha", type=float, default=0.0)
    g.add_argument("--domain", type=int, default=1 << 20)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--interval", type=int, default=500_000)
    g.add_argument("--seeds", default="0,1", help="evolving segment seeds")
    g.add_argument("--vertices", type=int, default=4096)
    g.add_argument("--degree", type=int, default=16)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("simulate", help="run one dataset through one app")
    s.add_argument("--dataset", required=True)
    s.add_argument("--app", required=True,
                   choices=["histo", "dp", "pr", "hll", "hhd"])
    s.add_argument("--alpha", type=float, help="label for the CSV row")
    s.add_argument("--vertices", type=int)
    s.add_argument("--iterations", type=int)
    s.add_argument("--threshold", type=float)
    s.add_argument("--window", type=int)
    s.add_argument("--profiling", type=int)
    s.add_argument("--overhead", type=int)
    _add_common(s)
    s.set_defaults(func=cmd_simulate)

    a = sub.add_parser("analyze", help="offline helper-count selection")
    a.add_argument("--dataset", required=True)
    a.add_argument("--app", default="histo",
                   choices=["histo", "dp", "pr", "hll", "hhd"])
    a.add_argument("--vertices", type=int)
    a.add_argument("--mode", choices=["offline", "online"], default="offline")
    a.add_argument("--tolerance", type=float, default=0.01)
    _add_common(a)
    a.set_defaults(func=cmd_analyze)

    sw = sub.add_parser("sweep", help="run an alpha x helper-count grid")
    sw.add_argument("--app", required=True,
                    choices=["histo", "dp", "pr", "hll", "hhd"])
    sw.add_argument("--alphas", default="0,1,2,3")
    sw.add_argument("--xs", default="0,1,2,4,8,15")
    sw.add_argument("--n", type=int, default=100_000)
    sw.add_argument("--m", type=int, default=16)
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--vertices", type=int, default=4096)
    sw.add_argument("--iterations", type=int)
    sw.add_argument("--out")
    sw.add_argument("--core", choices=["auto", "python", "compiled"],
                    default=None)
    sw.set_defaults(func=cmd_sweep)

    r = sub.add_parser("report", help="derive heatmap or speedup tables")
    r.add_argument("--mode", required=True, choices=["heatmap", "speedup"])
    r.add_argument("--app", default="histo",
                   choices=["histo", "dp", "hll", "hhd"])
    r.add_argument("--alphas", default="1,2,3")
    r.add_argument("--n", type=int, default=100_000)
    r.add_argument("--m", type=int, default=16)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--sweep", help="sweep CSV to derive speedups from")
    r.add_argument("--out")
    r.add_argument("--core", choices=["auto", "python", "compiled"],
                   default=None)
    r.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DatasetError, AnalyzerError, AppError,
            SimulationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: no such file: {exc.filename}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
