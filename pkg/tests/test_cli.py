import csv

import numpy as np
import pytest

from skewsim.cli import SWEEP_HEADER, main
from skewsim.datagen import load_edge_list, load_tuples


def run_cli(*argv):
    return main(list(argv))


def test_generate_writes_loadable_tuples(tmp_path):
    out = tmp_path / "z.bin"
    assert run_cli("generate", "--kind", "zipf", "--n", "5000",
                   "--alpha", "1.5", "--seed", "3", "--out", str(out)) == 0
    stream = load_tuples(out)
    assert len(stream) == 5000


def test_generate_writes_loadable_graph(tmp_path):
    out = tmp_path / "g.txt"
    assert run_cli("generate", "--kind", "graph", "--vertices", "256",
                   "--degree", "4", "--alpha", "1.0", "--seed", "1",
                   "--out", str(out)) == 0
    stream = load_edge_list(out, vertices=256)
    assert len(stream) == 256 * 4


def test_simulate_is_byte_deterministic(tmp_path, capsys):
    data = tmp_path / "d.bin"
    run_cli("generate", "--kind", "zipf", "--n", "4000", "--alpha", "2",
            "--seed", "5", "--out", str(data))
    outs = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        assert run_cli("simulate", "--dataset", str(data), "--app", "histo",
                       "--x", "4", "--seed", "5", "--out", str(out)) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert outs[0].startswith(",".join(SWEEP_HEADER).encode())


def test_sweep_grid_rows_and_header(tmp_path):
    out = tmp_path / "sweep.csv"
    assert run_cli("sweep", "--app", "histo", "--alphas", "0,2",
                   "--xs", "0,2,4", "--n", "3000", "--out", str(out)) == 0
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == SWEEP_HEADER
    assert len(rows) == 1 + 2 * 3
    assert [r[:4] for r in rows[1:]] == [
        ["histo", "0", "16", "0"], ["histo", "0", "16", "2"],
        ["histo", "0", "16", "4"], ["histo", "2", "16", "0"],
        ["histo", "2", "16", "2"], ["histo", "2", "16", "4"],
    ]


def test_sweep_parallel_output_matches_serial(tmp_path, monkeypatch):
    serial = tmp_path / "serial.csv"
    parallel = tmp_path / "parallel.csv"
    args = ["sweep", "--app", "hll", "--alphas", "0,3", "--xs", "0,4",
            "--n", "2000"]
    monkeypatch.setenv("SKEWSIM_THREADS", "1")
    assert run_cli(*args, "--out", str(serial)) == 0
    monkeypatch.setenv("SKEWSIM_THREADS", "4")
    assert run_cli(*args, "--out", str(parallel)) == 0
    assert serial.read_bytes() == parallel.read_bytes()


def test_report_speedup_from_sweep(tmp_path, capsys):
    sweep = tmp_path / "sweep.csv"
    run_cli("sweep", "--app", "histo", "--alphas", "3", "--xs", "0,15",
            "--n", "4000", "--out", str(sweep))
    capsys.readouterr()
    assert run_cli("report", "--mode", "speedup", "--sweep", str(sweep)) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "app,alpha,x,throughput,speedup"
    rows = [line.split(",") for line in lines[1:]]
    assert float(rows[0][4]) == 1.0  # x=0 baseline
    assert float(rows[1][4]) > 2.0   # helpers beat the collapsed baseline


def test_report_heatmap_shows_hot_cells(tmp_path, capsys):
    assert run_cli("report", "--mode", "heatmap", "--alphas", "3",
                   "--n", "4000", "--m", "16") == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "alpha," + ",".join(f"pe{p}" for p in range(16))
    ratios = [float(v) for v in lines[1].split(",")[1:]]
    assert len(ratios) == 16
    assert max(ratios) > 4.0  # the hot row dwarfs the uniform baseline


def test_analyze_prints_selection(tmp_path, capsys):
    data = tmp_path / "d.bin"
    run_cli("generate", "--kind", "single", "--n", "4000", "--seed", "2",
            "--out", str(data))
    capsys.readouterr()
    assert run_cli("analyze", "--dataset", str(data), "--m", "16") == 0
    out = capsys.readouterr().out
    assert "x: 15" in out
    assert "capacity:" in out
    assert "pe,sampled_tuples" in out


def test_missing_dataset_is_a_clean_error(tmp_path, capsys):
    assert run_cli("simulate", "--dataset", str(tmp_path / "nope.bin"),
                   "--app", "histo") == 2
    assert "error:" in capsys.readouterr().err


def test_malformed_config_is_a_clean_error(tmp_path, capsys):
    conf = tmp_path / "bad.conf"
    conf.write_text("m_pripe = 16\nx_secpe = 16\n")
    data = tmp_path / "d.bin"
    run_cli("generate", "--kind", "zipf", "--n", "100", "--out", str(data))
    assert run_cli("simulate", "--dataset", str(data), "--app", "histo",
                   "--config", str(conf)) == 2
    assert "x_secpe exceeds M-1" in capsys.readouterr().err


def test_unknown_subcommand_exits_nonzero():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code != 0


def test_pr_requires_vertices(tmp_path, capsys):
    graph = tmp_path / "g.txt"
    run_cli("generate", "--kind", "graph", "--vertices", "64",
            "--degree", "2", "--alpha", "0", "--seed", "1", "--out", str(graph))
    assert run_cli("simulate", "--dataset", str(graph), "--app", "pr") == 2
    assert "vertices" in capsys.readouterr().err
