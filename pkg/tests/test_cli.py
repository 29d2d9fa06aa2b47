import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from loewner import DescriptorSystem, read_dataset
from loewner.cli import (
    EXIT_DATA,
    EXIT_NUMERICAL,
    EXIT_VALIDATION,
    main,
    parse_orders,
    parse_range,
)
from loewner.errors import ValidationError


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def order20_csv(tmp_path):
    sysf = tmp_path / "sys.json"
    data = tmp_path / "data.csv"
    assert run("generate", "--modes", 10, "--mode-omega", "0.5:50", "--damping", "0.05:0.3",
               "--seed", 3, "-o", sysf) == 0
    assert run("sample", "--system", sysf, "--freqs", 50, "--omega", "0.1:100", "-o", data) == 0
    return sysf, data


def test_parse_helpers():
    assert parse_range("0.1:100") == (0.1, 100.0)
    assert parse_orders("10:200:10") == list(range(10, 201, 10))
    assert parse_orders("3:5") == [3, 4, 5]
    for bad in ("1", "a:b", "5:1", "0:4"):
        with pytest.raises(ValidationError):
            parse_orders(bad)


def test_generate_paper_dimensions(tmp_path):
    out = tmp_path / "s.json"
    assert run("generate", "--modes", 135, "--inputs", 3, "--outputs", 3, "--seed", 1, "-o", out) == 0
    doc = json.loads(out.read_text())
    assert (doc["n"], doc["m"], doc["p"]) == (270, 3, 3)


def test_generate_preset_matches_library(tmp_path):
    from loewner import iss_like_system

    out = tmp_path / "s.json"
    assert run("generate", "--preset", "iss-like", "--seed", 1, "-o", out) == 0
    assert DescriptorSystem.from_json(out.read_text()) == iss_like_system(1)


def test_generate_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert run("generate", "--modes", 7, "--seed", 9, "-o", p) == 0
    assert a.read_bytes() == b.read_bytes()


def test_generate_seed_env(tmp_path, monkeypatch):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    monkeypatch.setenv("LOEWNER_SEED", "17")
    assert run("generate", "--modes", 4, "-o", a) == 0
    monkeypatch.delenv("LOEWNER_SEED")
    assert run("generate", "--modes", 4, "--seed", 17, "-o", b) == 0
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("flags", [["--modes", 0], ["--modes", 3, "--damping", "0:0.1"], []])
def test_generate_validation(tmp_path, flags, capsys):
    assert run("generate", *flags, "-o", tmp_path / "x.json") == EXIT_VALIDATION
    assert not (tmp_path / "x.json").exists()
    assert "error" in capsys.readouterr().err


def test_sample_node_csv(tmp_path):
    sysf, data = tmp_path / "s.json", tmp_path / "d.csv"
    run("generate", "--modes", 5, "--inputs", 3, "--outputs", 3, "-o", sysf)
    assert run("sample", "--system", sysf, "--freqs", 400, "--omega", "0.1:100", "--node", "0,0", "-o", data) == 0
    rows = list(csv.reader(data.open()))
    assert rows[0] == ["omega", "re", "im"] and len(rows) == 401


def test_sample_mimo_json(tmp_path):
    sysf, data = tmp_path / "s.json", tmp_path / "d.json"
    run("generate", "--modes", 5, "--inputs", 2, "--outputs", 3, "-o", sysf)
    assert run("sample", "--system", sysf, "--freqs", 12, "-o", data) == 0
    ds = read_dataset(data)
    assert (ds.p, ds.m, len(ds)) == (3, 2, 12)


def test_sample_stdout_json_for_mimo(tmp_path, capsys):
    sysf = tmp_path / "s.json"
    run("generate", "--modes", 2, "--inputs", 2, "-o", sysf)
    capsys.readouterr()
    assert run("sample", "--system", sysf, "--freqs", 3) == 0
    assert json.loads(capsys.readouterr().out)["m"] == 2


def test_sample_pole_hit(tmp_path, capsys):
    sysf = tmp_path / "osc.json"
    osc = DescriptorSystem(np.eye(2), [[0.0, 1.0], [-1.0, 0.0]], [[0.0], [1.0]], [[1.0, 0.0]])
    sysf.write_text(osc.to_json())
    assert run("sample", "--system", sysf, "--freqs", 3, "--omega", "0.1:10", "-o", tmp_path / "d.csv") == EXIT_NUMERICAL
    assert "omega=1.0" in capsys.readouterr().err


def test_sample_bad_node(tmp_path):
    sysf = tmp_path / "s.json"
    run("generate", "--modes", 2, "-o", sysf)
    assert run("sample", "--system", sysf, "--node", "1,0", "-o", tmp_path / "d.csv") == EXIT_VALIDATION


def test_reduce_tol_finds_order(order20_csv, tmp_path):
    _, data = order20_csv
    model, sv = tmp_path / "m.json", tmp_path / "sv.csv"
    assert run("reduce", "--data", data, "--tol", "1e-12", "-o", model, "--sv", sv) == 0
    doc = json.loads(model.read_text())
    assert doc["n"] == 20
    assert not any(k.endswith("_im") for k in doc)
    rows = list(csv.reader(sv.open()))
    assert rows[0] == ["k", "sigma"] and len(rows) == 51


def test_reduce_explicit_r(order20_csv, tmp_path):
    _, data = order20_csv
    model = tmp_path / "m.json"
    assert run("reduce", "--data", data, "--r", 8, "-o", model) == 0
    assert json.loads(model.read_text())["n"] == 8


def test_reduce_complex_mode(order20_csv, tmp_path):
    _, data = order20_csv
    model = tmp_path / "m.json"
    assert run("reduce", "--data", data, "--real", "false", "--r", 10, "-o", model) == 0
    assert "E_im" in json.loads(model.read_text())


def test_reduce_r_zero(order20_csv, tmp_path):
    _, data = order20_csv
    assert run("reduce", "--data", data, "--r", 0, "-o", tmp_path / "m.json") == EXIT_VALIDATION


def test_reduce_r_too_large(order20_csv, tmp_path):
    _, data = order20_csv
    assert run("reduce", "--data", data, "--r", 500, "-o", tmp_path / "m.json") == EXIT_VALIDATION


def test_reduce_missing_data(tmp_path):
    assert run("reduce", "--data", tmp_path / "none.csv") == EXIT_VALIDATION


def test_reduce_malformed_data(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("omega,re,im\n1.0,2.0\n")
    assert run("reduce", "--data", bad, "-o", tmp_path / "m.json") == EXIT_DATA
    assert "line 2" in capsys.readouterr().err


def test_sweep_shape(order20_csv, tmp_path):
    _, data = order20_csv
    out = tmp_path / "sweep.csv"
    assert run("sweep", "--data", data, "--orders", "10:200:10", "-o", out) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["r", "epsilon", "status"]
    assert 1 <= len(rows) - 1 <= 20


def test_report_exact_recovery(order20_csv, tmp_path, capsys):
    _, data = order20_csv
    model, resp, rep = tmp_path / "m.json", tmp_path / "resp.csv", tmp_path / "rep.json"
    run("reduce", "--data", data, "--tol", "1e-12", "-o", model)
    capsys.readouterr()
    assert run("report", "--data", data, "--model", model, "-o", resp, "--json", rep) == 0
    err = capsys.readouterr().err
    eps = float(err.split("epsilon=")[1].split()[0])
    assert eps <= 1e-8
    assert json.loads(rep.read_text())["epsilon"] == eps
    assert resp.read_text().startswith("omega,|H|,|G|,argH,argG\n")


def test_report_dimension_mismatch(order20_csv, tmp_path):
    _, data = order20_csv
    sysf = tmp_path / "mimo.json"
    run("generate", "--modes", 2, "--inputs", 2, "--outputs", 2, "-o", sysf)
    assert run("report", "--data", data, "--model", sysf, "-o", tmp_path / "r.csv") == EXIT_VALIDATION


def test_inputs_not_mutated(order20_csv, tmp_path):
    sysf, data = order20_csv
    before = (sysf.read_bytes(), data.read_bytes())
    run("reduce", "--data", data, "--r", 6, "-o", tmp_path / "m.json")
    run("sweep", "--data", data, "--orders", "2:10:2", "-o", tmp_path / "s.csv")
    run("report", "--data", data, "--model", tmp_path / "m.json", "-o", tmp_path / "r.csv")
    assert (sysf.read_bytes(), data.read_bytes()) == before


def test_module_entry_point(tmp_path):
    out = tmp_path / "s.json"
    proc = subprocess.run(
        [sys.executable, "-m", "loewner", "generate", "--modes", "2", "-o", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads(out.read_text())["n"] == 4
