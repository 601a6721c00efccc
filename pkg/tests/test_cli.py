import pytest
import sys
import json
from pathlib import Path

sys.path.append(str(Path(__file__).resolve().parent))
sys.path.append(str(Path(__file__).resolve().parents[1]))

from oracles import cart, wig
from moyal_spin.angular import R
from moyal_spin.cli.main import EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, main
from moyal_spin.wigner import WignerCoeffs


def make_coeffs_file(tmp_path, op, name="w.json"):
    path = tmp_path / name
    path.write_text(json.dumps(wig(op).to_json()))
    return str(path)


def test_scenario_list(capsys):
    assert main(["scenario", "--list"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "two-spin-zz" in out
    assert "cnot-bell" in out


def test_scenario_run_writes_outputs(tmp_path):
    out = tmp_path / "out"
    assert main(["scenario", "single-precession", "--out", str(out), "--resolution", "6"]) == EXIT_OK
    assert (out / "single-precession_coefficients.json").exists()
    assert (out / "single-precession_oracle_dev.json").exists()


def test_scenario_without_source_is_usage_error():
    assert main(["scenario"]) == EXIT_USAGE


def test_transform_emits_coefficients(tmp_path):
    path = tmp_path / "ix.json"
    assert main(["transform", "I1x", "--emit", str(path)]) == EXIT_OK
    w = WignerCoeffs.from_json(json.loads(path.read_text()))
    assert w.allclose(wig(cart(1, (1, "x"))))


def test_transform_is_deterministic(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    args = ["transform", "pi*nu*2*I1z*I2z", "--spins", "2", "--param", "nu=1.5"]
    assert main(args + ["--emit", str(first)]) == EXIT_OK
    assert main(args + ["--emit", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_transform_bad_expression():
    assert main(["transform", "I1x +"]) == EXIT_USAGE
    assert main(["transform", "I1x", "--param", "nu"]) == EXIT_USAGE


def test_eval_at_north_pole(tmp_path, capsys):
    coeffs = make_coeffs_file(tmp_path, cart(1, (1, "z")))
    assert main(["eval", "--coeffs", coeffs, "--angles", "0", "0"]) == EXIT_OK
    re, im = (float(x) for x in capsys.readouterr().out.split())
    assert re == pytest.approx(R)
    assert im == pytest.approx(0.0, abs=1e-15)


def test_eval_rejects_bad_angles(tmp_path):
    coeffs = make_coeffs_file(tmp_path, cart(1, (1, "z")))
    assert main(["eval", "--coeffs", coeffs, "--angles", "0"]) == EXIT_USAGE
    assert main(["eval", "--coeffs", coeffs, "--angles", "4", "0"]) == EXIT_USAGE
    assert main(["eval", "--coeffs", str(tmp_path / "missing.json"), "--angles", "0", "0"]) == EXIT_USAGE


def test_star_matches_operator_product(tmp_path):
    a = make_coeffs_file(tmp_path, cart(1, (1, "x")), "a.json")
    b = make_coeffs_file(tmp_path, cart(1, (1, "y")), "b.json")
    out = tmp_path / "ab.json"
    assert main(["star", "--a", a, "--b", b, "--emit", str(out)]) == EXIT_OK
    w = WignerCoeffs.from_json(json.loads(out.read_text()))
    assert w.max_abs_diff(wig(cart(1, (1, "x")) @ cart(1, (1, "y")))) < 1e-12
    prestar = tmp_path / "pre.json"
    assert main(["star", "--a", a, "--b", b, "--prestar", "--emit", str(prestar)]) == EXIT_OK
    assert WignerCoeffs.from_json(json.loads(prestar.read_text())).max_rank == 2


def test_evolve_with_oracle(tmp_path):
    out = tmp_path / "trajectory.json"
    assert main(["evolve", "--scenario", "two-spin-zz", "--times", "0:0.125:0.5", "--oracle", "--emit", str(out)]) == EXIT_OK
    records = json.loads(out.read_text())
    assert [record["t"] for record in records] == [0.0, 0.125, 0.25, 0.375, 0.5]
    assert max(record["max_oracle_dev"] for record in records) < 1e-10
    final = WignerCoeffs.from_json(records[-1]["coeffs"])
    assert final.max_abs_diff(wig(2 * cart(2, (1, "y"), (2, "z")))) < 1e-10


def test_evolve_bad_times():
    assert main(["evolve", "--scenario", "two-spin-zz", "--times", "0:0.1"]) == EXIT_USAGE
    assert main(["evolve", "--scenario", "two-spin-zz", "--times", "0:a:1"]) == EXIT_USAGE
    assert main(["evolve", "--scenario", "two-spin-zz", "--times", "0:0:1"]) == EXIT_USAGE


def test_evolve_tight_tolerance_fails_validation(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"oracle_tolerance": -1.0}))
    args = ["--config", str(config), "evolve", "--scenario", "single-precession", "--oracle", "--emit", str(tmp_path / "t.json")]
    assert main(args) == EXIT_VALIDATION


def test_sample_surface_files(tmp_path):
    coeffs = make_coeffs_file(tmp_path, cart(1, (1, "z")))
    out = tmp_path / "surface.csv"
    assert main(["sample", "--coeffs", coeffs, "--resolution", "5", "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "theta,phi,re,im"
    assert len(lines) == 26
    assert float(lines[1].split(",")[2]) == pytest.approx(R)


def test_sample_props_terms(tmp_path):
    bell = 0.25 * cart(2) + cart(2, (1, "x"), (2, "x")) - cart(2, (1, "y"), (2, "y")) + cart(2, (1, "z"), (2, "z"))
    coeffs = make_coeffs_file(tmp_path, bell)
    out = tmp_path / "bell.obj"
    args = ["sample", "--coeffs", coeffs, "--slot", "2", "--resolution", "4", "--props", "--format", "obj", "--out", str(out)]
    assert main(args) == EXIT_OK
    assert sorted(p.name for p in tmp_path.glob("bell_term*.obj")) == [f"bell_term{k}.obj" for k in range(4)]


def test_sample_bad_slot(tmp_path):
    coeffs = make_coeffs_file(tmp_path, cart(1, (1, "z")))
    assert main(["sample", "--coeffs", coeffs, "--slot", "2", "--out", str(tmp_path / "s.csv")]) == EXIT_USAGE


def test_validate_reports_postulates(capsys):
    assert main(["validate", "--spins", "2", "--trials", "5", "--seed", "1"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["passed"] is True
    assert payload["n_spins"] == 2


def test_coeffs_dump(tmp_path):
    out = tmp_path / "coeffs.csv"
    assert main(["coeffs", "dump", "--max-j", "1", "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "name,j1,j2,L,re,im"
    assert any(line.startswith("U,1,1,1,") for line in lines)


def test_unknown_subcommand_exits_with_usage():
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == EXIT_USAGE


def test_scenario_file_with_list_spin_is_usage_error(tmp_path):
    path = tmp_path / "bad.json"
    payload = {
        "n_spins": 1,
        "J": [1],
        "hamiltonian": "I1z",
        "initial_state": "I1x",
        "times": {"start": 0, "stop": 1, "step": 0.5},
    }
    path.write_text(json.dumps(payload))
    assert main(["scenario", str(path), "--out", str(tmp_path / "out")]) == EXIT_USAGE
