import json
import subprocess
import sys

import pytest

from softq.bench import format_suite, write_suite_csv
from softq.cli import main


def write_cfg(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def xor_cfg(tmp_path):
    return write_cfg(tmp_path, {"task": "xor", "model": "sqp", "out": str(tmp_path / "run")})


def test_train_writes_outputs(xor_cfg, tmp_path, capsys):
    assert main(["train", "--config", xor_cfg]) == 0
    out = tmp_path / "run"
    assert {p.name for p in out.iterdir()} >= {"run.json", "run_metrics.csv", "run_topology.json"}
    assert "test accuracy 100.00%" in capsys.readouterr().out
    rec = json.loads((out / "run.json").read_text())
    assert len(rec["epochs"]) == 20 and rec["config"]["experiment"]["task"] == "xor"


def test_rerun_is_byte_identical(tmp_path):
    outs = []
    for k in range(2):
        cfg = write_cfg(tmp_path, {"task": "circles", "model": "sqp", "optimizer": {"epochs": 5},
                                   "data": {"n_train": 40, "n_test": 20},
                                   "sweep": {"probs": [0.1, 0.5], "repetitions": 3, "stochastic_realization": True,
                                             "shots": 50},
                                   "out": str(tmp_path / f"r{k}")}, f"c{k}.json")
        assert main(["train", "--config", cfg]) == 0
        assert main(["sweep", "--config", cfg, "--threads", "2"]) == 0
        outs.append(tmp_path / f"r{k}")
    for name in ("run_metrics.csv", "sweep.csv", "sweep.txt"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


@pytest.mark.parametrize("engine", ["meanfield", "oracle", "trajectory"])
def test_eval_engines(xor_cfg, tmp_path, engine):
    assert main(["train", "--config", xor_cfg]) == 0
    assert main(["eval", "--config", xor_cfg, "--engine", engine, "--shots", "2000"]) == 0
    report = json.loads((tmp_path / "run" / f"eval_{engine}.json").read_text())
    assert report["test_accuracy"] == 1.0


def test_sweep_trains_when_no_checkpoint(xor_cfg, tmp_path, capsys):
    assert main(["sweep", "--config", xor_cfg, "--channel", "bit_flip,phase_flip", "--probs", "0.1,0.5"]) == 0
    table = capsys.readouterr().out
    assert "Bit flip" in table and "Phase flip" in table
    lines = (tmp_path / "run" / "sweep.csv").read_text().splitlines()
    assert lines[0] == "channel,p,mean_accuracy,std_accuracy,repetitions"
    assert len(lines) == 5


@pytest.mark.parametrize("args", [
    ["sweep", "--probs", ""],
    ["sweep", "--probs", "0.1,abc"],
    ["sweep", "--probs", "0.7"],
    ["sweep", "--channel", "amplitude_damping"],
    ["sweep", "--channel", "none"],
    ["eval", "--checkpoint", "/nonexistent/run.json"],
])
def test_usage_errors_exit_2(xor_cfg, args, capsys):
    assert main([args[0], "--config", xor_cfg, *args[1:]]) == 2
    assert "error" in capsys.readouterr().err


def test_malformed_config_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"task": "xor",\n "model": }')
    assert main(["train", "--config", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err


def test_schema_violation_names_field(tmp_path, capsys):
    cfg = write_cfg(tmp_path, {"task": "xor", "model": "sqp", "optimizer": {"lr": -1}})
    assert main(["train", "--config", cfg]) == 2
    assert "optimizer.lr" in capsys.readouterr().err


def test_unknown_bench_suite_exit_2(capsys):
    assert main(["bench", "everything"]) == 2


def test_missing_mnist_exit_3(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SOFTQ_DATA_DIR", str(tmp_path / "empty"))
    cfg = write_cfg(tmp_path, {"task": "mnist", "model": "smp", "data": {"classes": [3, 8]},
                               "out": str(tmp_path / "m")})
    assert main(["train", "--config", cfg]) == 3
    assert "fetch-mnist" in capsys.readouterr().err


def test_divergence_exit_4(tmp_path, capsys):
    cfg = write_cfg(tmp_path, {"task": "xor", "model": "sqp", "optimizer": {"epochs": 5, "lr": 1e308},
                               "out": str(tmp_path / "d")})
    with pytest.warns(RuntimeWarning):
        assert main(["train", "--config", cfg]) == 4
    assert "diverged" in capsys.readouterr().err


def test_mnist_train(tmp_path, mnist_dir, monkeypatch):
    monkeypatch.setenv("SOFTQ_DATA_DIR", str(mnist_dir))
    cfg = write_cfg(tmp_path, {"task": "mnist", "model": "smp", "data": {"classes": [3, 8], "per_class_cap": 50,
                                                                         "test_cap": 20},
                               "optimizer": {"epochs": 3, "lr": 0.05}, "out": str(tmp_path / "m")})
    assert main(["train", "--config", cfg]) == 0
    rec = json.loads((tmp_path / "m" / "run.json").read_text())
    assert rec["final"]["layer_sizes"] == [16, 2]


def test_baseline_models_via_cli(tmp_path):
    for model, extra in (("mlp", {"hidden": [4], "optimizer": {"epochs": 20, "lr": 0.05}}),
                         ("pqc", {"pqc": {"n_qubits": 2, "depth": 1}, "optimizer": {"epochs": 3}})):
        cfg = write_cfg(tmp_path, {"task": "circles", "model": model, "out": str(tmp_path / model), **extra},
                        f"{model}.json")
        assert main(["train", "--config", cfg]) == 0
        assert main(["eval", "--config", cfg]) == 0
        assert main(["sweep", "--config", cfg]) == 2


def test_analyze_discord(tmp_path, capsys):
    assert main(["analyze", "discord", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "discord.json").read_text())
    assert doc["discord"]["measured_1"] <= 1e-6 and doc["discord"]["measured_2"] > 1e-3
    assert doc["negativity"] <= 1e-12


def test_analyze_deferred(tmp_path):
    assert main(["analyze", "deferred", "--seed", "3", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "deferred.json").read_text())
    assert doc["max_difference"] <= 1e-12 and doc["seed"] == 3


def test_analyze_bad_arguments(tmp_path):
    assert main(["analyze", "discord", "--p1", "1.5", "--out", str(tmp_path)]) == 2
    assert main(["analyze", "discord", "--w", "1,2", "--out", str(tmp_path)]) == 2


def test_suite_csv_and_table(tmp_path):
    header = ["dataset", "smp", "pqc_cited"]
    rows = [["{3,6}", 0.9, float("nan")], ["{3,8}", 0.88, 0.8533]]
    text = write_suite_csv(header, rows, tmp_path / "s.csv").read_text().splitlines()
    assert text == ['dataset,smp,pqc_cited', '"{3,6}",0.9,', '"{3,8}",0.88,0.8533']
    table = format_suite(header, rows)
    assert "n/a" in table and "85.33%" in table and "published" in table


def test_console_script_help():
    res = subprocess.run([sys.executable, "-m", "softq.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for verb in ("train", "eval", "sweep", "analyze", "bench", "fetch-mnist"):
        assert verb in res.stdout
