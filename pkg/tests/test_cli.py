import csv
import io
import json
import subprocess
import sys

import pytest

from monofourier import cli


def _write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def _rows(out_dir):
    return list(csv.DictReader(io.StringIO((out_dir / "results.csv").read_text())))


def _risk_cfg(tmp_path, **extra):
    cfg = {"experiment": "risk-curve", "id": "dict10", "output": str(tmp_path / "out"),
           "seed": 11, "function": {"tag": "dictator", "dim": 10, "i": 1},
           "n_grid": [100, 1000, 10000], "noise": {"kind": "gaussian", "scale": 0.5},
           "replicates": 8}
    cfg.update(extra)
    return cfg


def test_risk_curve(tmp_path):
    assert cli.main(["run", _write(tmp_path, _risk_cfg(tmp_path))]) == 0
    rows = _rows(tmp_path / "out")
    assert [int(r["n"]) for r in rows] == [100, 1000, 10000]
    risks = [float(r["mean_risk"]) for r in rows]
    assert risks[0] >= risks[1] >= risks[2]
    assert all(r["experiment_id"] == "dict10" and r["replicates"] == "8" for r in rows)
    prov = json.loads((tmp_path / "out" / "provenance.json").read_text())
    assert prov["backend"] in ("python", "cython")
    assert len(prov["replicate_seeds"]) == 8


def test_provenance_rerun_is_byte_identical(tmp_path):
    cli.main(["run", _write(tmp_path, _risk_cfg(tmp_path))])
    first = (tmp_path / "out" / "results.csv").read_bytes()
    prov_path = tmp_path / "prov_copy.json"
    prov_path.write_bytes((tmp_path / "out" / "provenance.json").read_bytes())
    (tmp_path / "out" / "results.csv").unlink()
    assert cli.main(["run", str(prov_path)]) == 0
    assert (tmp_path / "out" / "results.csv").read_bytes() == first


def test_normalize_is_idempotent(tmp_path):
    cfg = cli.normalize(_risk_cfg(tmp_path))
    assert cli.normalize(cfg) == cfg
    cli.main(["run", _write(tmp_path, _risk_cfg(tmp_path))])
    prov = json.loads((tmp_path / "out" / "provenance.json").read_text())
    assert cli.normalize(prov["config"]) == prov["config"]


def test_seed_override(tmp_path):
    path = _write(tmp_path, _risk_cfg(tmp_path, n_grid=[200]))
    cli.main(["run", path])
    a = (tmp_path / "out" / "results.csv").read_text()
    cli.main(["run", path, "--seed", "12"])
    b = (tmp_path / "out" / "results.csv").read_text()
    assert a != b and _rows(tmp_path / "out")[0]["seed"] == "12"


def test_spectral_check(tmp_path):
    cfg = {"experiment": "spectral-check", "output": str(tmp_path / "o"),
           "function": {"tag": "majority", "dim": 9}, "d0_list": [1, 2, 3],
           "delta_list": [0.5, 0.1]}
    assert cli.main(["run", _write(tmp_path, cfg)]) == 0
    rows = _rows(tmp_path / "o")
    assert len(rows) == 6 and all(r["bound_satisfied"] == "True" for r in rows)


def test_influence_profile(tmp_path):
    cfg = {"experiment": "influence-profile", "output": str(tmp_path / "o"),
           "function": {"tag": "tribes", "dim": 6, "width": 2, "blocks": 3}}
    assert cli.main(["run", _write(tmp_path, cfg)]) == 0
    rows = _rows(tmp_path / "o")
    assert len(rows) == 6
    for r in rows:
        assert float(r["l1"]) == pytest.approx(float(r["l1_conditional_means"]), abs=1e-12)
        assert float(r["l2"]) == pytest.approx(float(r["l2_spectral"]), abs=1e-12)


def test_baseline_compare(tmp_path):
    cfg = _risk_cfg(tmp_path, experiment="baseline-compare", n_grid=[1000])
    assert cli.main(["run", _write(tmp_path, cfg)]) == 0
    rows = _rows(tmp_path / "out")
    assert [r["experiment_id"] for r in rows] == ["dict10/fourier", "dict10/constant"]
    assert float(rows[0]["mean_risk"]) < float(rows[1]["mean_risk"])


@pytest.mark.parametrize("s", [2, 4])
def test_lower_bound(tmp_path, s):
    cfg = {"experiment": "lower-bound", "output": str(tmp_path / "o"),
           "lower_bound": {"s": s, "K": 1.0, "sigma": 0.5, "n": 1000}}
    assert cli.main(["run", _write(tmp_path, cfg)]) == 0
    rows = _rows(tmp_path / "o")
    assert len(rows) >= 2 and all(r["monotone"] == "True" for r in rows)
    prov = json.loads((tmp_path / "o" / "provenance.json").read_text())
    assert prov["result"]["s"] == s and prov["result"]["verification"]["all_ok"]


@pytest.mark.parametrize("cfg", [
    {"experiment": "risk-curve"},
    {"experiment": "bogus", "output": "x"},
    {"experiment": "risk-curve", "output": "x", "function": {"tag": "majority", "dim": 3}},
    {"experiment": "risk-curve", "output": "x", "n_grid": [10], "unknown": 1,
     "function": {"tag": "majority", "dim": 3}},
    {"experiment": "risk-curve", "output": "x", "n_grid": [10],
     "function": {"tag": "dictator", "dim": 3}},
    {"experiment": "risk-curve", "output": "x", "n_grid": [10],
     "function": {"tag": "dictator", "dim": 3, "i": 4}},
])
def test_malformed_config(tmp_path, cfg, capsys):
    cfg = {**cfg, **({"output": str(tmp_path / "o")} if "output" in cfg else {})}
    assert cli.main(["run", _write(tmp_path, cfg)]) == 1
    assert "error" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_unreadable_config(tmp_path):
    assert cli.main(["run", str(tmp_path / "missing.json")]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["run", str(bad)]) == 1


def test_capacity_exit(tmp_path):
    cfg = {"experiment": "spectral-check", "output": str(tmp_path / "o"),
           "function": {"tag": "majority", "dim": 21}, "d0_list": [1], "delta_list": [0.1]}
    assert cli.main(["run", _write(tmp_path, cfg)]) == 2
    assert not (tmp_path / "o").exists()


def test_infeasible_exit(tmp_path):
    cfg = {"experiment": "lower-bound", "output": str(tmp_path / "o"),
           "lower_bound": {"s": 4, "K": 1000.0, "sigma": 0.5, "n": 1000}}
    assert cli.main(["run", _write(tmp_path, cfg)]) == 3
    assert not (tmp_path / "o").exists()


def test_usage_exit():
    assert cli.main([]) == 1
    assert cli.main(["frobnicate"]) == 1


def test_schema_command(capsys):
    assert cli.main(["schema"]) == 0
    assert json.loads(capsys.readouterr().out) == cli.CONFIG_SCHEMA


def test_console_entry(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "monofourier.cli", "schema"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "monofourier experiment config" in proc.stdout
