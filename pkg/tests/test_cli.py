import json

import pytest

from netperturb.cli import main
from netperturb.graph import read_edgelist


def test_gen_and_measure(tmp_path):
    g = tmp_path / "g.edges"
    assert main(["gen", "--model", "er", "--n", "100", "--k", "5.7", "--seed", "7",
                 "--out", str(g)]) == 0
    assert read_edgelist(g).num_edges == 285
    m = tmp_path / "m.json"
    assert main(["measure", "--in", str(g), "--out", str(m)]) == 0
    data = json.loads(m.read_text())
    assert data["Degree"] == pytest.approx(5.7)
    assert len([k for k in data if k != "flags"]) == 14


def test_gen_geo_writes_coordinates(tmp_path):
    g = tmp_path / "geo.edges"
    assert main(["gen", "--model", "GEO", "--n", "16", "--out", str(g)]) == 0
    assert read_edgelist(g).coords is not None


def test_exit_codes(tmp_path, capsys):
    assert main(["gen", "--model", "geo", "--n", "20", "--out", str(tmp_path / "x")]) == 2
    assert main(["gen", "--model", "nope", "--n", "20", "--out", str(tmp_path / "x")]) == 2
    assert main(["measure", "--in", str(tmp_path / "missing")]) == 4
    assert main(["frobnicate"]) == 2
    bad = tmp_path / "bad.toml"
    bad.write_text("Q = 0\nmodel = GEO\nsizes = [20]\n")
    assert main(["run", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().err
    assert "not a perfect square" in err and "realizations" in err
    assert main(["run", "--config", str(tmp_path / "none.toml"), "--out", "o"]) == 4
    empty = tmp_path / "empty.edges"
    empty.write_text("1 0\n")
    assert main(["measure", "--in", str(empty)]) == 0


def test_degeneracy_exit_code(tmp_path):
    cfg = tmp_path / "c.toml"
    # every 2-node BA network is a single edge: assortativity is degenerate at every cell
    cfg.write_text("models = BA\nexperiments = SIZE\nsizes = [2, 3]\nQ = 2\navg_degree = 1\n")
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 3


def test_run_simnet_cluster_report(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "exp.toml"
    cfg.write_text("models = [\"ER\", \"GEO\"]\nexperiments = REMOVAL\nQ = 2\nsteps = 10\n"
                   "stride = 5\nseed = 3\n")
    out = tmp_path / "results"
    monkeypatch.setenv("NETPERTURB_WORKERS", "2")
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    assert (out / "membership.csv").exists()
    sim = tmp_path / "sim.json"
    assert main(["simnet", "--curves", str(out / "curves.csv"), "--stats",
                 str(out / "stats.csv"), "--out", str(sim)]) == 0
    ours = json.loads(sim.read_text())["cells"]
    theirs = json.loads((out / "simnet.json").read_text())["cells"]
    assert ours == theirs
    assert main(["simnet", "--curves", str(out / "curves.csv"),
                 "--out", str(tmp_path / "s.dot")]) == 0
    nwk = tmp_path / "d.nwk"
    assert main(["cluster", "--simnet", str(sim), "--out", str(nwk)]) == 0
    assert nwk.read_text() == "".join(
        line.replace(line[line.index(" "):line.index("]")], "") + "\n"
        for line in (out / "dendrogram.nwk").read_text().splitlines())
    assert main(["cluster", "--simnet", str(sim), "--linkage", "single",
                 "--out", str(tmp_path / "d.json")]) == 0
    capsys.readouterr()
    assert main(["report", str(out)]) == 0
    text = capsys.readouterr().out
    assert "ER/REMOVAL" in text and "Avg.Short.Paths" in text and "master seed 3" in text
