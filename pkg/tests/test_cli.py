from __future__ import annotations

import csv
import json
import os

import numpy as np
import pytest

from attrinet.cli import ExperimentConfig, main, run_experiment, set_threads
from attrinet.errors import ConfigError


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _small_config(tmp_path, name="out", **over):
    cfg = {"preset": "symmetric", "n": 20_000, "reps": 20_000, "bias_reps": 2, "seed": 20261016,
           "outputs": str(tmp_path / name), "fringe_cap": 2,
           "suites": {"theory": True, "generate": True, "pagerank": True, "sample": True, "fringe": True,
                      "bias": True, "rare_minority": {"a": 0.01, "D": 1.0}}}
    cfg.update(over)
    return cfg


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"preset": "ba", "colour": "red"})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"preset": "ba", "suites": {"plots": True}})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"preset": "ba", "params": {"pi": [1.0], "kappa": [[1.0]]}})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"suites": {"theory": True}})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"preset": "nope"})


def test_empty_config_writes_only_manifest(tmp_path):
    code, status = run_experiment({"outputs": str(tmp_path / "e")})
    assert code == 0 and status == {}
    assert sorted(os.listdir(tmp_path / "e")) == ["manifest.json"]


def test_unknown_key_exit_code(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"preset": "ba", "bogus": 1}))
    assert main(["run", "--config", str(path)]) == 1


def test_theory_command_single_type(capsys):
    assert main(["theory", "--preset", "ba", "-c", "0.6"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["lambda_c"] == pytest.approx(1.6)
    assert doc["degree_tail_exponent"] == pytest.approx([2.0])


def test_full_run_is_deterministic(tmp_path):
    a = _small_config(tmp_path, "a")
    b = _small_config(tmp_path, "b")
    assert run_experiment(a)[0] == 0
    assert run_experiment(b)[0] == 0
    fa = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*") if p.is_file())
    fb = sorted(p.relative_to(tmp_path / "b") for p in (tmp_path / "b").rglob("*") if p.is_file())
    assert fa == fb
    for rel in fa:
        if rel.name == "manifest.json":
            continue
        assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes(), rel
    man = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert man["complete"] is True
    assert all(s["status"] == "ok" for s in man["suites"].values())
    assert {"theory.json", "census.json", "samples.csv", "comparison.csv", "fringe.csv", "bias.json",
            "rare_minority.json", "figures/sampling.png"} <= set(man["files"])


def test_uniform_sampling_within_tolerance(tmp_path):
    cfg = _small_config(tmp_path, suites={"sample": True}, schemes=[{"kind": "uniform"}, {"kind": "in_degree"}])
    assert run_experiment(cfg)[0] == 0
    rows = _read_csv(tmp_path / "out" / "comparison.csv")
    uni = [r for r in rows if r["statistic"].startswith("sample.uniform")]
    assert len(uni) == 2
    assert all(abs(float(r["z"])) < 4 for r in uni)


def test_compare_self_is_zero(tmp_path, capsys):
    th = tmp_path / "theory.json"
    assert main(["theory", "--preset", "asymmetric", "--out", str(tmp_path)]) == 0
    assert main(["compare", str(th), str(th)]) == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert rows and all(float(r["z"]) == 0.0 for r in rows)


def test_compare_detects_tampering(tmp_path, capsys):
    assert main(["theory", "--preset", "asymmetric", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "theory.json").read_text())
    doc["params"]["pi"] = [0.3, 0.7]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    assert main(["compare", str(tmp_path / "theory.json"), str(bad)]) == 1
    assert "HashMismatch" in capsys.readouterr().err


def test_generate_then_stored_graph_commands(tmp_path, capsys):
    gdir = tmp_path / "g"
    assert main(["generate", "--preset", "asymmetric", "-n", "500", "--seed", "5", "--out", str(gdir)]) == 0
    assert (gdir / "vertices.csv").exists() and (gdir / "edges.csv").exists()
    assert main(["pagerank", str(gdir), "-c", "0.5"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "id,attribute,fr,r" and len(lines) == 502
    assert main(["sample", str(gdir), "--scheme", "pagerank_walk", "-c", "0.5", "--reps", "100"]) == 0
    assert json.loads(capsys.readouterr().out)["reps"] == 100
    assert main(["census", str(gdir), "--fringe-cap", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["n_vertices"] == 501


def test_bias_and_rare_minority_commands(capsys):
    assert main(["bias", "--preset", "asymmetric", "-p", "0.5", "--alpha", "0.01"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["theory"]["bias"] == pytest.approx(-0.011694360363156787, abs=1e-12)
    assert main(["rare-minority", "-a", "0.0001", "-D", "0.5"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["asymptotic"]["stationary"] == pytest.approx(0.5)


def test_missing_params_is_an_error(capsys):
    assert main(["theory"]) == 1
    assert "ConfigError" in capsys.readouterr().err


def test_thread_flag_beats_environment(monkeypatch):
    import numba

    top = int(numba.config.NUMBA_NUM_THREADS)
    monkeypatch.setenv("ATTRINET_THREADS", "1")
    assert set_threads(None) == 1
    assert set_threads(top) == top
    with pytest.raises(ConfigError):
        set_threads(0)
