import json
import os

import pytest

from qaoa_entanglement import cli


def body(path):
    # drop the timestamp comment line
    return open(path, encoding="utf-8").read().split("\n", 1)[1]


def test_randomized_outputs_and_replay(tmp_path):
    out = tmp_path / "a"
    assert cli.main(["randomized", "--graph", "complete", "--sizes", "4,6", "--depth", "3",
                     "--problems", "2", "--threads", "1", "--output", str(out)]) == 0
    assert sorted(os.listdir(out)) == ["manifest.json", "summary.json", "sweep.csv"]
    manifest = json.load(open(out / "manifest.json", encoding="utf-8"))
    assert manifest["config"]["sizes"] == [4, 6]
    assert cli.main(["randomized", "--config", str(out / "manifest.json"), "--threads", "2",
                     "--output", str(tmp_path / "b")]) == 0
    assert body(out / "sweep.csv") == body(tmp_path / "b" / "sweep.csv")


def test_set_override_and_preset(tmp_path):
    args = cli.build_parser().parse_args(["randomized", "--preset", "desk", "--set", "n_problems=3",
                                          "--set", "spectrum_layers=[2]"])
    c = cli.load_config(args, "randomized")
    assert c.sizes == [10, 12] and c.depths == [12] and c.n_problems == 3
    assert c.spectrum_layers == [2]


def test_optimized_results_json(tmp_path):
    out = tmp_path / "o"
    assert cli.main(["optimized", "--graph", "regular3", "--sizes", "4", "--depth", "1",
                     "--problems", "2", "--restarts", "2", "--threads", "1",
                     "--output", str(out)]) == 0
    res = json.load(open(out / "optimized.json", encoding="utf-8"))
    assert [r["problem_id"] for r in res] == [0, 1]
    assert set(res[0]) >= {"problem_id", "p", "restarts", "best_cost", "angles", "seed"}


def test_anneal_and_analyze(tmp_path, capsys):
    out = tmp_path / "an"
    assert cli.main(["anneal", "--graph", "regular3", "--sizes", "4,6", "--time-list", "1,2,4",
                     "--dt", "0.1", "--problems", "2", "--threads", "1", "--output", str(out)]) == 0
    assert cli.main(["analyze", "--input", str(out / "sweep.csv"), "--fit", "alpha",
                     "--figure", "fig5g", "--output", str(out)]) == 0
    fit = json.load(open(out / "fit_alpha.json", encoding="utf-8"))
    assert "alpha" in fit
    assert cli.main(["analyze", "--input", str(out / "sweep.csv"), "--fit", "kappa",
                     "--window", "0.2,1", "--output", str(out)]) == 0


def test_graph_commands(tmp_path):
    assert cli.main(["gen-graphs", "--graph", "linear", "--sizes", "4", "--problems", "3",
                     "--output", str(tmp_path)]) == 0
    assert len(json.load(open(tmp_path / "graphs.json", encoding="utf-8"))) == 3
    assert cli.main(["graph-stats", "--graph", "complete", "--sizes", "4,6", "--problems", "2",
                     "--output", str(tmp_path)]) == 0
    stats = json.load(open(tmp_path / "graph_stats.json", encoding="utf-8"))
    assert [r["mean"] for r in stats["shortest_paths"]] == [1.0, 1.0]


def test_exit_codes(tmp_path, monkeypatch):
    with pytest.raises(SystemExit) as e:
        cli.main(["randomized", "--nope"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        cli.main([])
    assert e.value.code == 2
    assert cli.main(["randomized", "--sizes", "5", "--output", str(tmp_path)]) == 3
    assert cli.main(["randomized", "--set", "colour=red", "--output", str(tmp_path)]) == 3
    assert cli.main(["analyze", "--input", str(tmp_path / "missing.csv")]) == 1


def test_threads_env(monkeypatch):
    monkeypatch.setenv("QAOAE_THREADS", "3")
    assert cli.resolve_threads(None) == 3
    assert cli.resolve_threads(2) == 2
    assert cli.resolve_threads(0) == (os.cpu_count() or 1)


def test_selftest():
    assert cli.main(["selftest"]) == 0
