import json

import pytest
from click.testing import CliRunner

from sparserank.cli import main

POISSON_DOC = {
    "spec": {
        "q": 2,
        "ddist": {"kind": "poisson", "mean": 2.5},
        "kdist": {"kind": "fixed", "value": 3},
    },
    "n_values": [48],
    "trials": 3,
    "seed": 5,
}


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def config_path(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(POISSON_DOC))
    return str(p)


def test_threshold_check(runner, config_path):
    res = runner.invoke(main, ["threshold", "check", "--config", config_path])
    assert res.exit_code == 0, res.output
    rep = json.loads(res.output)
    assert rep["holds"] is True and rep["coprime"] is True


def test_threshold_xorsat(runner):
    res = runner.invoke(main, ["threshold", "xorsat", "-k", "3", "--tol", "1e-4"])
    assert res.exit_code == 0, res.output
    assert 2.7 < json.loads(res.output)["threshold"] < 2.8


def test_threshold_xorsat_bad_k(runner):
    res = runner.invoke(main, ["threshold", "xorsat", "-k", "2"])
    assert res.exit_code == 2


def test_phi_curve(runner, config_path, tmp_path):
    out = tmp_path / "phi.csv"
    res = runner.invoke(
        main, ["phi", "curve", "--config", config_path, "--points", "1000", "--out", str(out)]
    )
    assert res.exit_code == 0, res.output
    lines = out.read_text().splitlines()
    assert lines[1] == "z,phi"
    assert len(lines) == 1002


def test_gen_and_rank_roundtrip(runner, config_path, tmp_path):
    mtx = tmp_path / "matrix.mtx"
    res = runner.invoke(
        main,
        ["gen", "--config", config_path, "-n", "48", "--seed", "7",
         "--model", "simple", "--out", str(mtx)],
    )
    assert res.exit_code == 0, res.output
    res = runner.invoke(main, ["rank", "--in", str(mtx), "--frozen"])
    assert res.exit_code == 0, res.output
    rep = json.loads(res.output)
    assert rep["rank"] + rep["nullity"] == 48
    assert rep["frozen_count"] == len(rep["frozen"])


def test_gen_pairing_model(runner, config_path, tmp_path):
    mtx = tmp_path / "p.mtx"
    res = runner.invoke(
        main,
        ["gen", "--config", config_path, "-n", "48", "--seed", "7",
         "--model", "pairing", "--out", str(mtx)],
    )
    assert res.exit_code == 0, res.output
    assert "model=pairing" in mtx.read_text()


def test_gen_unattainable_exit_2(runner, tmp_path):
    doc = {"q": 2, "ddist": {"kind": "fixed", "value": 4},
           "kdist": {"kind": "fixed", "value": 8}}
    p = tmp_path / "c.json"
    p.write_text(json.dumps(doc))
    mtx = tmp_path / "x.mtx"
    res = runner.invoke(
        main, ["gen", "--config", str(p), "-n", "9", "--seed", "0", "--out", str(mtx)]
    )
    assert res.exit_code == 2


def test_gen_retries_exhausted_exit_3(runner, tmp_path):
    # d = k = 8 at n = 8 leaves the simple-matching acceptance ~ e^-24.5
    doc = {"q": 2, "ddist": {"kind": "fixed", "value": 8},
           "kdist": {"kind": "fixed", "value": 8}}
    p = tmp_path / "c.json"
    p.write_text(json.dumps(doc))
    mtx = tmp_path / "x.mtx"
    res = runner.invoke(
        main, ["gen", "--config", str(p), "-n", "8", "--seed", "0", "--out", str(mtx)]
    )
    assert res.exit_code == 3


def test_lattice_basis_and_verify(runner):
    res = runner.invoke(main, ["lattice", "basis", "-q", "9", "--coeffs", "1,1,1"])
    assert res.exit_code == 0, res.output
    rep = json.loads(res.output)
    assert rep["det_abs"] == 9 and rep["kind"] == "identical"

    res = runner.invoke(main, ["lattice", "verify", "-q", "7", "--coeffs", "1,2,3"])
    assert res.exit_code == 0, res.output
    rep = json.loads(res.output)
    assert rep["all_ok"] is True and rep["expected_det"] == 1


def test_lattice_bad_coeffs_exit_2(runner):
    res = runner.invoke(main, ["lattice", "basis", "-q", "4", "--coeffs", "1,5,1"])
    assert res.exit_code == 2


def test_mc_fullrank(runner, config_path, tmp_path):
    out = tmp_path / "mc.csv"
    res = runner.invoke(
        main, ["mc", "fullrank", "--config", config_path, "--out", str(out)]
    )
    assert res.exit_code == 0, res.output
    text = out.read_text()
    assert text.startswith("# sparse-rank v1, seed=5, experiment=fullrank")
    assert "aggregate" in text


def test_mc_nullity_missing_delta_exit_2(runner, config_path):
    res = runner.invoke(main, ["mc", "nullity", "--config", config_path])
    assert res.exit_code == 2


def test_mc_bad_config_exit_2(runner, tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    res = runner.invoke(main, ["mc", "fullrank", "--config", str(p)])
    assert res.exit_code == 2
