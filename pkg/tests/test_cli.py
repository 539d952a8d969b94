import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from footfall.cli import main


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def pipeline(tmp_path):
    corpus, model = tmp_path / "c.json", tmp_path / "m.json"
    assert run("generate", "--activities", 8, "--visitors", 120, "--seed", 1,
               "--out", corpus, "--no-timestamp") == 0
    assert run("train", "--corpus", corpus, "--out", model, "--no-timestamp") == 0
    return tmp_path, corpus, model


def test_generate_train(tmp_path):
    c, m = tmp_path / "c.json", tmp_path / "m.json"
    assert run("generate", "--activities", 6, "--visitors", 60, "--seed", 1, "--out", c) == 0
    assert run("train", "--corpus", c, "--out", m) == 0
    data = json.loads(m.read_text())
    P = np.array(data["P"])
    assert P.shape == (6, 6)
    np.testing.assert_allclose(P.sum(axis=0), 1.0, atol=1e-9)
    assert data["n"] == 6 and data["format_version"] == 1
    corpus = json.loads(c.read_text())
    assert len(corpus["patterns"]) == 60 and corpus["config"]["n_activities"] == 6


def test_byte_identical_outputs(tmp_path):
    outs = []
    for k, threads in enumerate((1, 4)):
        c, m = tmp_path / f"c{k}.json", tmp_path / f"m{k}.json"
        run("generate", "--activities", 9, "--visitors", 300, "--seed", 5, "--out", c,
            "--no-timestamp", "--threads", threads)
        run("train", "--corpus", c, "--out", m, "--no-timestamp")
        outs.append((c.read_bytes(), m.read_bytes()))
    assert outs[0] == outs[1]


def test_timestamp_field(tmp_path):
    c = tmp_path / "c.json"
    run("generate", "--activities", 3, "--visitors", 3, "--out", c)
    assert "created" in json.loads(c.read_text())


def test_recommend(pipeline, capsys):
    _, _, model = pipeline
    capsys.readouterr()
    assert run("recommend", "--model", model, "--history", "7,2,3", "--cut", 2, "--window", 3) == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out["recommendations"]) == 2 and len(out["scores"]) == 2
    assert all(0 <= r < 8 for r in out["recommendations"])


def test_recommend_bad_id(pipeline, capsys):
    _, _, model = pipeline
    assert run("recommend", "--model", model, "--history", "8") == 1
    assert "out of range" in capsys.readouterr().err


def test_evaluate(capsys):
    assert run("evaluate", "--original", "0,4", "--recommended", "3,4") == 0
    out = json.loads(capsys.readouterr().out)
    assert out["evaluation"] == pytest.approx(29 / 26)
    assert out["evaluation_bounded"] == pytest.approx(26 / 29)
    assert out["exact_match"] == 0.5


def test_optimize(pipeline):
    tmp, _, model = pipeline
    layout, trace = tmp / "l.json", tmp / "t.csv"
    assert run("optimize", "--model", model, "--pop", 20, "--gens", 30, "--seed", 2,
               "--out", layout, "--trace", trace, "--no-timestamp") == 0
    rows = list(csv.reader(trace.open()))
    assert rows[0] == ["generation", "best_fitness"] and len(rows) == 32
    data = json.loads(layout.read_text())
    assert len(data["genes"]) == 8 and len(set(data["genes"])) == 8
    assert data["positions"][0] == [0, 0]


def test_sweep_ga(pipeline):
    tmp, _, model = pipeline
    cfg = tmp / "sweep.json"
    cfg.write_text(json.dumps({"model": model.name, "crossover_values": [0.1, 0.5],
                               "mutation_values": [0.2, 0.4], "repeats": 2,
                               "population_size": 10, "generations": 10, "seed": 3}))
    assert run("sweep-ga", "--config", cfg, "--out-dir", tmp / "out", "--no-timestamp") == 0
    summary = json.loads((tmp / "out" / "ga_sweep_summary.json").read_text())
    assert np.shape(summary["means"]) == (2, 2)
    assert summary["best_cell"]["mean"] == max(max(r) for r in summary["means"])
    assert (tmp / "out" / "ga_sweep.csv").exists() and (tmp / "out" / "ga_sweep_stddev.csv").exists()


def test_compare_random(pipeline):
    tmp, _, model = pipeline
    cfg = tmp / "cmp.json"
    cfg.write_text(json.dumps({"model": model.name, "repeats": 2, "population_size": 10,
                               "generations": 15}))
    assert run("compare-random", "--config", cfg, "--out-dir", tmp / "o", "--seed", 1) == 0
    ga = (tmp / "o" / "trace_ga_r0.csv").read_text().splitlines()
    rnd = (tmp / "o" / "trace_random_r0.csv").read_text().splitlines()
    assert len(ga) == len(rnd) == 17
    assert ga[1] == rnd[1]
    assert json.loads((tmp / "o" / "compare_summary.json").read_text())["repeats"] == 2


def test_sweep_recommend(pipeline):
    tmp, corpus, _ = pipeline
    cfg = tmp / "rec.json"
    cfg.write_text(json.dumps({"corpus": corpus.name, "cut_values": [1, 2],
                               "window_values": [0, 1], "test_fraction": 0.25}))
    assert run("sweep-recommend", "--config", cfg, "--out-dir", tmp / "r") == 0
    for stem in ("recommend_grid", "recommend_grid_exact_match", "recommend_grid_raw"):
        assert (tmp / "r" / f"{stem}.csv").exists()
    assert json.loads((tmp / "r" / "recommend_grid_summary.json").read_text())["n_patterns"] == 30


def test_unknown_config_key(pipeline, capsys):
    tmp, _, model = pipeline
    cfg = tmp / "bad.json"
    cfg.write_text(json.dumps({"model": model.name, "mutaton_chance": 0.3}))
    assert run("compare-random", "--config", cfg, "--out-dir", tmp / "x") == 1
    assert "mutaton_chance" in capsys.readouterr().err


def test_validation_names_parameter(tmp_path, capsys):
    assert run("generate", "--activities", 1, "--visitors", 3, "--out", tmp_path / "c.json") == 1
    assert "n_activities" in capsys.readouterr().err
    assert run("optimize", "--model", tmp_path / "missing.json", "--out", tmp_path / "l.json") == 1
    assert "I/O error" in capsys.readouterr().err


def test_usage_errors():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["generate", "--activities", "x"])
    assert exc.value.code == 2


def test_threads_env(tmp_path, monkeypatch):
    monkeypatch.setenv("FOOTFALL_THREADS", "3")
    assert run("generate", "--activities", 4, "--visitors", 40, "--out", tmp_path / "c.json") == 0
    monkeypatch.setenv("FOOTFALL_THREADS", "many")
    assert run("generate", "--activities", 4, "--visitors", 40, "--out", tmp_path / "c.json") == 1


def test_help_lists_flags():
    proc = subprocess.run([sys.executable, "-m", "footfall", "optimize", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    for flag in ("--pop", "--gens", "--crossover", "--mutation", "--seed", "--trace", "--threads"):
        assert flag in proc.stdout


def test_module_unknown_subcommand():
    proc = subprocess.run([sys.executable, "-m", "footfall", "nope"], capture_output=True, text=True)
    assert proc.returncode == 2 and "usage" in proc.stderr
