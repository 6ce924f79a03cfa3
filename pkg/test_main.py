#!/usr/bin/env python3
"""
End-to-end tests of the netdist command line
"""

import io
import json
import os
import tempfile
from contextlib import redirect_stdout
from pathlib import Path

from main import benchmark_config, build_parser, main

K3 = "0 1\n1 2\n0 2\n"
P3 = "0 1\n1 2\n"


def run(*argv):
    """(exit code, parsed JSON from stdout or None)"""
    out = io.StringIO()
    with redirect_stdout(out):
        try:
            code = main(list(argv))
        except SystemExit as e:
            code = e.code
    text = out.getvalue()
    return code, (json.loads(text) if text.strip() else None)


def write(path, text):
    Path(path).write_text(text)
    return str(path)


def test_compare():
    with tempfile.TemporaryDirectory() as tmp:
        k3 = write(os.path.join(tmp, "k3.edges"), K3)
        p3 = write(os.path.join(tmp, "p3.edges"), P3)
        square = write(os.path.join(tmp, "c4.edges"), "0 1\n1 2\n2 3\n3 0\n")

        code, report = run("compare", k3, k3, "--all")
        assert code == 0
        values = {k: v for k, v in report.items() if k != "params"}
        assert len(values) == 8 and all(v == 0 for v in values.values())

        code, report = run("compare", k3, p3, "--edit", "--spectral-laplacian")
        assert code == 0 and report["edit"] == 2
        assert abs(report["spectral_laplacian[k=all,p=2]"] - 2) < 1e-12
        assert report["params"]["p_norm"] == 2.0

        code, report = run("compare", k3, p3, "--distances", "spectral_adjacency", "--k", "1", "--out", tmp)
        assert code == 0 and set(report) == {"spectral_adjacency[k=1,p=2]", "params"}
        assert json.loads(Path(tmp, "compare.json").read_text()) == report
        assert json.loads(Path(tmp, "manifest.json").read_text())["command"] == "compare"

        assert run("compare", k3, square, "--edit") == (3, None)
        assert run("compare", k3, square, "--spectral-adjacency")[0] == 0
        assert run("compare", k3, p3, "--distances", "hamming")[0] == 2
        assert run("compare", k3, p3, "--edit", "--p-norm", "half")[0] == 2
        assert run("compare", k3, os.path.join(tmp, "missing.edges"), "--edit")[0] == 2
    print("✓ compare")


def test_benchmark_presets():
    parser = build_parser()
    cfg = benchmark_config(parser.parse_args(["benchmark", "--preset", "pa"])).to_dict()
    assert cfg["alternative"]["params"] == {"l": 6}
    assert cfg["null"]["params"] == {"p": 0.12}
    assert cfg["null"]["n"] == cfg["alternative"]["n"] == 100
    assert cfg["n_samples"] == 500 and cfg["master_seed"] == 0

    cfg = benchmark_config(parser.parse_args(["benchmark", "--preset", "lattice", "--seed", "9"])).to_dict()
    degrees = cfg["null"]["params"]["degrees"]
    assert cfg["null"]["model"] == "random_degree_sequence" and cfg["alternative"]["model"] == "lattice2d"
    assert [degrees.count(d) for d in (2, 3, 4)] == [4, 32, 64]
    assert cfg["master_seed"] == 9

    cfg = benchmark_config(parser.parse_args(["benchmark", "--preset", "ws", "--edit", "--distances", "resistance"]))
    assert cfg.distance_ids == ["edit", "resistance_renormalized[penalty=auto]"]

    os.environ["NETDIST_SEED"] = "41"
    try:
        assert benchmark_config(parser.parse_args(["benchmark", "--preset", "sbm"])).master_seed == 41
        assert benchmark_config(parser.parse_args(["benchmark", "--preset", "sbm", "--seed", "2"])).master_seed == 2
    finally:
        del os.environ["NETDIST_SEED"]

    assert run("benchmark", "--preset", "nope")[0] == 2
    assert run("benchmark")[0] == 2
    assert run("benchmark", "--preset", "pa", "--seed", "-1")[0] == 2
    print("✓ benchmark presets")


def test_benchmark_is_deterministic():
    config = {
        "name": "tiny",
        "null": {"model": "gnp", "n": 12, "params": {"p": 0.4}},
        "alternative": {"model": "sbm2", "n": 12, "params": {"p": 0.8, "q": 0.1}},
        "distances": [{"kind": "edit"}, {"kind": "spectral_adjacency", "k": 2}],
        "n_samples": 8,
    }
    with tempfile.TemporaryDirectory() as tmp:
        path = write(os.path.join(tmp, "tiny.json"), json.dumps(config))
        outputs = []
        for run_dir, threads in (("a", "1"), ("b", "2")):
            out = os.path.join(tmp, run_dir)
            code, boxes = run("benchmark", "--config", path, "--seed", "7", "--threads", threads,
                              "--sweep", "laplacian", "--k-values", "1,12", "--out", out)
            assert code == 0 and set(boxes) == {"edit", "spectral_adjacency[k=2,p=2]"}
            outputs.append([Path(out, name).read_bytes() for name in ("results.json", "boxstats.csv")])
            manifest = json.loads(Path(out, "manifest.json").read_text())
            assert manifest["config"]["experiment"]["master_seed"] == 7
            assert "experiment" in manifest["timing"]
        assert outputs[0] == outputs[1]
        rows = outputs[0][1].decode().splitlines()
        assert len(rows) == 1 + 2 + 2 and rows[-1].startswith("spectral_laplacian[k=12,p=2],12,")
        assert rows[3] == "spectral_laplacian[k=1,p=2],1,,,,,"

        # default k starts at 2 for the Laplacians
        out = os.path.join(tmp, "default_k")
        code, _ = run("benchmark", "--config", path, "--sweep", "laplacian,normalized_laplacian", "--out", out)
        assert code == 0
        rows = Path(out, "boxstats.csv").read_text().splitlines()
        assert len(rows) == 1 + 2 + 11 + 11
        assert all(",," not in row for row in rows[3:])
        assert json.loads(Path(out, "manifest.json").read_text())["config"]["k_values"]["laplacian"][0] == 2

        assert run("benchmark", "--config", path, "--sweep", "signless", "--out", tmp)[0] == 2
        assert run("benchmark", "--config", os.path.join(tmp, "none.json"))[0] == 2
        write(path, "[1, 2]")
        assert run("benchmark", "--config", path)[0] == 2
    print("✓ benchmark output is byte-identical across runs")


def test_anomaly():
    with tempfile.TemporaryDirectory() as tmp:
        events = write(os.path.join(tmp, "contacts.csv"),
                       "t,u,v\n0.5,0,1\n0.6,2,3\n1.5,0,1\n1.6,2,3\n2.5,0,1\n2.6,2,3\n3.5,0,2\n3.6,1,3\n")
        out = os.path.join(tmp, "run")
        code, report = run("anomaly", "--events", events, "--t-start", "0", "--t-end", "4",
                           "--intervals", "4", "--top-k", "1", "--out", out)
        assert code == 0 and report == {"edit": [{"index": 3, "normalized": 3.0}]}
        lines = Path(out, "series_edit.csv").read_text().splitlines()
        assert lines[0] == "index,t_label,raw,normalized" and lines[3] == "3,3.0,8.0,3.0"

        code, report = run("anomaly", "--events", events, "--t-start", "0", "--t-end", "4",
                           "--intervals", "4", "--edit", "--deltacon", "--out", out)
        assert code == 0 and len(report) == 2
        assert sorted(p.name for p in Path(out).glob("series_*.csv")) == [
            "series_deltacon_eps=auto.csv", "series_edit.csv",
        ]

        empty = write(os.path.join(tmp, "empty.csv"), "t,u,v\n")
        assert run("anomaly", "--events", empty, "--intervals", "10", "--out", out)[0] == 5
        assert run("anomaly", "--out", out)[0] == 2

        edges = Path(tmp, "seq")
        edges.mkdir()
        for i, text in enumerate([K3, K3, P3]):
            write(edges / f"{i:04d}.edges", text)
        code, report = run("anomaly", "--edges-dir", str(edges), "--out", out)
        assert code == 0 and report["edit"][0] == {"index": 2, "normalized": 2.0}
    print("✓ anomaly")


def test_generate():
    with tempfile.TemporaryDirectory() as tmp:
        code, listing = run("generate", "--model", "pa", "--n", "100", "--l", "6", "--count", "3",
                            "--seed", "5", "--out", tmp)
        assert code == 0 and [f["m"] for f in listing["files"]] == [564, 564, 564]
        for name in ("0000.edges", "0001.edges", "0002.edges"):
            assert len(Path(tmp, name).read_text().splitlines()) == 564

        again = os.path.join(tmp, "again")
        assert run("generate", "--model", "pa", "--n", "100", "--l", "6", "--count", "3",
                   "--seed", "5", "--out", again)[1] == listing

        square = os.path.join(tmp, "square")
        assert run("generate", "--model", "lattice2d", "--rows", "2", "--cols", "2", "--out", square)[0] == 0
        assert len(Path(square, "0000.edges").read_text().splitlines()) == 4

        assert run("generate", "--model", "gnp", "--n", "10", "--p", "1.5", "--out", tmp)[0] == 2
        assert run("generate", "--model", "gnp", "--p", "0.5", "--out", tmp)[0] == 2
        assert run("generate", "--model", "kronecker", "--n", "4", "--out", tmp)[0] == 2
        assert run("generate", "--model", "gnp", "--n", "8", "--p", "0", "--max-retries", "2",
                   "--out", tmp)[0] == 6
    print("✓ generate")


def test_density():
    with tempfile.TemporaryDirectory() as tmp:
        assert run("density", "--model", "gnp", "--n", "20", "--p", "0.3", "--graphs", "5",
                   "--bins", "8", "--out", tmp)[0] == 0
        lines = Path(tmp, "density.csv").read_text().splitlines()
        assert lines[0] == "bin_left,bin_right,density" and len(lines) == 9
        assert run("density", "--model", "gnp", "--n", "20", "--p", "0.3", "--graphs", "0", "--out", tmp)[0] == 2
    print("✓ density")
