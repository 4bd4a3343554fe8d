"""End-to-end command-line pipeline: simulate, learn, score, eval,
convert, markov, heads; manifests and exit codes."""

import json
import subprocess
import sys

import numpy as np
import pytest

from gesmag.cli import main
from gesmag.graph import parse_graph


def run(argv):
    return main(argv)


def test_simulate_learn_eval_pipeline(tmp_path, capsys):
    out_dir = tmp_path / "sims"
    assert run([
        "simulate", "--n", "4", "--pd", "0.6", "--avg-degree", "2.0",
        "--reps", "2", "--N", "2000", "--seed", "7", "--out-dir", str(out_dir),
    ]) == 0
    graph0 = out_dir / "graph_0.graph"
    data0 = out_dir / "data_0.csv"
    assert graph0.exists() and data0.exists() and (out_dir / "graph_1.graph").exists()
    manifest = json.loads((out_dir / "graph_0.graph.manifest.json").read_text())
    assert manifest["tool"] == "gesmag" and "elapsed_seconds" in manifest
    truth = parse_graph(graph0.read_text())
    assert truth.n == 4 and truth.num_edges() == 4
    data = np.loadtxt(data0, delimiter=",", skiprows=1)
    assert data.shape == (2000, 4)

    est = tmp_path / "est.graph"
    report = tmp_path / "learn.json"
    assert run([
        "learn", "--data", str(data0), "--out", str(est),
        "--report", str(report), "--turn", "1", "--seed", "0",
    ]) == 0
    out = capsys.readouterr().out
    assert "score" in out and "edges" in out
    learned = parse_graph(est.read_text())
    assert learned.n == 4
    rep = json.loads(report.read_text())
    assert rep["trajectory"][0] >= rep["score"]
    learn_manifest = json.loads((tmp_path / "est.graph.manifest.json").read_text())
    assert str(data0) in learn_manifest["inputs"]

    eval_report = tmp_path / "eval.json"
    assert run([
        "eval", "--est", str(est), "--truth", str(graph0),
        "--data", str(data0), "--report", str(eval_report),
    ]) == 0
    capsys.readouterr()  # discard the one-line eval summary
    metrics = json.loads(eval_report.read_text())
    assert 0.0 <= metrics["edge_mark_accuracy"] <= 1.0
    assert "log_bic_diff" in metrics and "edge_type_rates" in metrics

    # score the learned graph and the truth
    assert run(["score", "--data", str(data0), "--graph", str(est)]) == 0
    score_est = json.loads(capsys.readouterr().out)
    assert run(["score", "--data", str(data0), "--graph", str(graph0)]) == 0
    score_truth = json.loads(capsys.readouterr().out)
    assert score_est["total"] <= score_truth["total"] * 1.01


def test_eval_batch_directory(tmp_path, capsys):
    import csv
    import shutil

    out_dir = tmp_path / "sims"
    assert run([
        "simulate", "--n", "4", "--pd", "0.6", "--avg-degree", "2.0",
        "--reps", "2", "--N", "1000", "--seed", "3", "--out-dir", str(out_dir),
    ]) == 0
    for k in range(2):
        est = out_dir / f"est_{k}.graph"
        assert run([
            "learn", "--data", str(out_dir / f"data_{k}.csv"),
            "--out", str(est), "--seed", "0",
        ]) == 0
    capsys.readouterr()
    report = tmp_path / "batch.csv"
    assert run(["eval", "--batch", str(out_dir), "--report", str(report)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["replications"] == 2
    with open(report, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["rep"] for r in rows] == ["0", "1", "mean"]
    accs = [float(r["edge_mark_accuracy"]) for r in rows]
    assert accs[2] == pytest.approx((accs[0] + accs[1]) / 2)
    assert float(summary["mean"]["edge_mark_accuracy"]) == pytest.approx(accs[2])
    assert "log_bic_diff" in rows[0]
    assert (tmp_path / "batch.csv.manifest.json").exists()

    # an est file without its truth graph is a reported error
    shutil.copy(out_dir / "est_0.graph", out_dir / "est_9.graph")
    assert run(["eval", "--batch", str(out_dir), "--report", str(report)]) == 1
    # non-batch mode still requires both --est and --truth
    assert run(["eval", "--est", str(out_dir / "est_0.graph"),
                "--report", str(report)]) == 1


def test_convert_round_trip(tmp_path, dense_mag):
    src = tmp_path / "mag.graph"
    from gesmag.graph import format_graph

    src.write_text(format_graph(dense_mag))
    pag = tmp_path / "pag.graph"
    assert run(["convert", "--mag-to-pag", "--in", str(src), "--out", str(pag)]) == 0
    back = tmp_path / "back.graph"
    assert run(["convert", "--pag-to-mag", "--in", str(pag), "--out", str(back)]) == 0
    from gesmag.heads import markov_equivalent

    assert markov_equivalent(parse_graph(back.read_text()), dense_mag)
    # missing mode is a reported error, not a traceback
    assert run(["convert", "--in", str(src), "--out", str(pag)]) == 1


def test_markov_and_heads_output(tmp_path, dense_mag, capsys):
    src = tmp_path / "mag.graph"
    from gesmag.graph import format_graph

    src.write_text(format_graph(dense_mag))
    assert run(["markov", "--graph", str(src)]) == 0
    lines = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    assert {"A": [0], "B": [2], "C": [1]} in lines
    assert run(["heads", "--graph", str(src)]) == 0
    heads = json.loads(capsys.readouterr().out)
    assert heads["parametrizing_set_size"] == 13
    assert {"head": [2, 3], "tail": [0, 1]} in heads["heads"]


def test_runtime_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "empty.csv"
    bad.write_text("X0,X1\n")
    assert run(["learn", "--data", str(bad), "--out", str(tmp_path / "o.graph")]) == 1
    assert "error:" in capsys.readouterr().err


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["learn"])  # missing required arguments
    assert exc.value.code == 2


def test_console_script_installed():
    proc = subprocess.run(
        ["gesmag", "--help"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "simulate" in proc.stdout and "probe" in proc.stdout
