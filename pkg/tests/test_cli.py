import json
import math

import pytest
from scipy.special import gamma

from fraxol.cli import EXIT_CONFIG, EXIT_INCONCLUSIVE, EXIT_NO_CONVERGENCE, EXIT_OK, main, parse_config
from fraxol.presets import existence_example, nonexistence_example


@pytest.fixture
def spec_exist(tmp_path):
    p = tmp_path / "ex_exist.json"
    p.write_text(existence_example(resolution=16).to_json())
    return p


@pytest.fixture
def spec_nonexist(tmp_path):
    p = tmp_path / "ex_nonexist.json"
    p.write_text(nonexistence_example(resolution=16).to_json())
    return p


def test_torsion_stdout(capsys):
    assert main(["torsion", "--s", "0.25", "--points", "3"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "radius,value"
    assert float(lines[1].split(",")[1]) == pytest.approx(1 / (math.sqrt(2) * gamma(1.25) ** 2), rel=1e-11)
    assert lines[-1] == "1,0"


def test_grid_info(tmp_path):
    assert main(["grid-info", "--resolution", "8", "--out", str(tmp_path)]) == EXIT_OK
    rows = (tmp_path / "grid.csv").read_text().splitlines()
    assert rows[0] == "index,x1,x2,weight"
    assert sum(float(r.split(",")[3]) for r in rows[1:]) == pytest.approx(math.pi, rel=1e-10)


def test_spectrum(tmp_path):
    assert main(["spectrum", "--s", "0.5", "--resolution", "16", "--out", str(tmp_path)]) == EXIT_OK
    data = json.loads((tmp_path / "spectrum.json").read_text())
    assert list(data) == ["s", "resolution", "spectral_radius", "mu", "residual", "sup_norm_G1"]
    assert data["spectral_radius"] <= data["sup_norm_G1"] + 1e-10
    assert data["mu"] * data["spectral_radius"] == pytest.approx(1.0)


def test_harmonic_constant(tmp_path):
    assert main(["harmonic", "--s", "0.75", "--resolution", "12", "--out", str(tmp_path)]) == EXIT_OK
    vals = [float(r.split(",")[-1]) for r in (tmp_path / "harmonic.csv").read_text().splitlines()[1:]]
    assert max(abs(v - 1) for v in vals) <= 1e-6


def test_certify_existence(spec_exist, tmp_path):
    out = tmp_path / "o"
    assert main(["certify", str(spec_exist), "--out", str(out), "--require-certified"]) == EXIT_OK
    v = json.loads((out / "verdict.json").read_text())
    assert v["outcome"] == "existence_certified" and v["slacks"]["c2_1"] > 0


def test_certify_inconclusive_exit(spec_nonexist, tmp_path):
    code = main(["certify", str(spec_nonexist), "--mode", "existence", "--out", str(tmp_path), "--require-certified"])
    assert code == EXIT_INCONCLUSIVE
    assert main(["certify", str(spec_nonexist), "--mode", "existence", "--out", str(tmp_path)]) == EXIT_OK


def test_solve_picard(spec_exist, tmp_path):
    assert main(["solve", str(spec_exist), "--out", str(tmp_path)]) == EXIT_OK
    rep = json.loads((tmp_path / "solve_report.json").read_text())
    assert rep["converged"] and rep["verified"] and rep["nonzero_positive"]
    assert (tmp_path / "solution.csv").read_text().startswith("index,x1,x2,u1,u2\n")


def test_solve_no_convergence(spec_exist, tmp_path):
    assert main(["solve", str(spec_exist), "--max-iter", "2", "--out", str(tmp_path)]) == EXIT_NO_CONVERGENCE


def test_solve_multistart(spec_nonexist, tmp_path):
    args = ["solve", str(spec_nonexist), "--method", "multistart", "--n-starts", "5", "--out", str(tmp_path)]
    assert main(args) == EXIT_OK
    rep = json.loads((tmp_path / "solve_report.json").read_text())
    assert all(s["sup_norm"] <= 1e-6 for s in rep["solutions"])


def test_scan(spec_exist, tmp_path):
    args = ["scan", str(spec_exist), "--axis", "lambda1=0.02:0.1:5", "--out", str(tmp_path)]
    assert main(args) == EXIT_OK
    rows = (tmp_path / "scan.csv").read_text(encoding="utf-8").splitlines()
    assert rows[0] == "λ1,λ2,η1,η2,verdict,min_slack"
    assert len(rows) == 6


def test_example_writes_spec(tmp_path):
    args = ["example", "nonexistence", "--resolution", "12", "--certify", "--out", str(tmp_path)]
    assert main(args) == EXIT_OK
    assert json.loads((tmp_path / "verdict.json").read_text())["outcome"] == "nonexistence_certified"
    assert json.loads((tmp_path / "spec.json").read_text())["resolution"] == 12


@pytest.mark.parametrize("content", ["{not json", json.dumps({"components": []})])
def test_bad_spec_exit_code(tmp_path, content):
    p = tmp_path / "bad.json"
    p.write_text(content)
    assert main(["certify", str(p), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_missing_spec_and_bad_args(tmp_path):
    assert main(["certify", str(tmp_path / "nope.json")]) == EXIT_CONFIG
    assert main(["torsion"]) == EXIT_CONFIG
    assert main(["torsion", "--s", "1.5"]) == EXIT_CONFIG


def test_bad_axis_and_box(spec_exist, tmp_path):
    assert main(["scan", str(spec_exist), "--axis", "lambda1", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["certify", str(spec_exist), "--box", "1,2,3", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_parse_config_options():
    cfg = parse_config(["solve", "x.json", "--seed", "7", "--tol", "1e-9"])
    assert cfg.subcommand == "solve" and cfg.seed == 7 and cfg.tol == 1e-9
    assert "method" not in cfg.options and cfg.spec_path.name == "x.json"
