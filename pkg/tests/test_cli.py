"""Command-line interface: exit codes, determinism, file emission."""

import json

import pytest

from smallsphere.cli import main

pytestmark = pytest.mark.usefixtures("clear_seed_env")


@pytest.fixture
def clear_seed_env(monkeypatch):
    monkeypatch.delenv("SMALLSPHERE_SEED", raising=False)


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_verify_flat_all_zero_ledger(capsys):
    code, out = run(capsys, "verify", "--ricci", "flat")
    assert code == 0
    doc = json.loads(out)
    assert doc["allPass"] is True
    assert len(doc["runs"]) == 1
    run0 = doc["runs"][0]
    assert run0["coefficients"]["mDot"] == "0"
    assert run0["coefficients"]["r5"] == "0"
    assert all(e["pass"] for e in run0["ledger"])


def test_verify_small_batch_passes(capsys):
    code, out = run(capsys, "verify", "--trials", "3", "--seed", "11")
    assert code == 0
    doc = json.loads(out)
    labels = [r["label"] for r in doc["runs"]]
    assert labels[:2] == ["flat", "round:1"]
    assert labels[2:] == ["random:11", "random:12", "random:13"]


def test_verify_deterministic_output(capsys):
    code1, out1 = run(capsys, "verify", "--trials", "5", "--seed", "7")
    code2, out2 = run(capsys, "verify", "--trials", "5", "--seed", "7")
    assert code1 == code2 == 0
    assert out1 == out2


def test_verify_env_seed(capsys, monkeypatch):
    monkeypatch.setenv("SMALLSPHERE_SEED", "42")
    _, out_env = run(capsys, "verify", "--trials", "1")
    _, out_flag = run(capsys, "verify", "--trials", "1", "--seed", "42")
    assert json.loads(out_env)["runs"][-1]["label"] == "random:42"
    assert out_env == out_flag


def test_verify_rejects_bad_ricci_file(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2 3 4 5 1/0\n")
    code, _ = run(capsys, "verify", "--ricci", f"file:{bad}")
    assert code == 2


def test_verify_rejects_bad_trials(capsys):
    code, _ = run(capsys, "verify", "--trials", "0")
    assert code == 2


def test_expand_round(capsys):
    code, out = run(capsys, "expand", "--ricci", "round:1",
                    "--format", "table")
    assert code == 0
    assert "m(r) = 1/2 r^3 - 1/4 r^5" in out


def test_expand_flat_zero_polynomial(capsys):
    code, out = run(capsys, "expand", "--ricci", "flat", "--format", "table")
    assert code == 0
    assert "m(r) = 0" in out


def test_expand_delta_r_flag_and_magnitude(capsys):
    code, out = run(capsys, "expand", "--ricci", "random:3",
                    "--delta-r", "120/1")
    assert code == 0
    doc = json.loads(out)
    exp = doc["expansion"]
    assert exp["coefficients"]["deltaRCoeff"] == "1"
    assert any(f["name"] == "delta_r_sign_discrepancy"
               for f in exp["flags"])


def test_expand_writes_report_and_figure(capsys, tmp_path):
    out_path = tmp_path / "expansion.json"
    code, _ = run(capsys, "expand", "--ricci", "round:1",
                  "--out", str(out_path))
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert doc["expansion"]["coefficients"]["mDot"] == "1/2"
    assert (tmp_path / "expansion_mass.png").exists()


def test_expand_no_plot(capsys, tmp_path):
    out_path = tmp_path / "e.json"
    code, _ = run(capsys, "expand", "--ricci", "flat", "--out",
                  str(out_path), "--no-plot")
    assert code == 0
    assert not (tmp_path / "e_mass.png").exists()


def test_oracle_flat(capsys):
    code, out = run(capsys, "oracle", "--ricci", "flat", "--grid", "16x32")
    assert code == 0
    doc = json.loads(out)
    assert doc["allPass"] is True
    assert all(c["delta"] < 1e-10 for c in doc["checks"])


def test_oracle_rejects_three_radii(capsys):
    code, _ = run(capsys, "oracle", "--ricci", "flat", "--grid", "16x32",
                  "--radii", "0.16,0.08,0.04")
    assert code == 2


def test_oracle_writes_csv_and_figure(capsys, tmp_path):
    # default radii: the stated tolerances assume the four-radius fit
    out_path = tmp_path / "fit.json"
    code, _ = run(capsys, "oracle", "--ricci", "round:1", "--grid", "16x32",
                  "--out", str(out_path))
    assert code == 0
    assert (tmp_path / "fit_K.csv").exists()
    assert (tmp_path / "fit_sigma_tt.csv").exists()
    assert (tmp_path / "fit_convergence.png").exists()


def test_oracle_grid_minimum(capsys):
    code, _ = run(capsys, "oracle", "--ricci", "flat", "--grid", "8x16")
    assert code == 2


def test_oracle_tolerance_override_can_fail(capsys):
    code, out = run(capsys, "oracle", "--ricci", "round:1",
                    "--grid", "16x32", "--tol-k-dot", "1e-15")
    assert code == 1
    doc = json.loads(out)
    assert doc["allPass"] is False


def test_csv_format(capsys):
    code, out = run(capsys, "verify", "--ricci", "flat", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "run,entry,computed,paper,pass"
    assert all(line.endswith("True") for line in lines[1:])


def test_bad_radii_rejected(capsys):
    code, _ = run(capsys, "expand", "--ricci", "flat",
                  "--radii", "0.01,0.02")
    assert code == 2
    code, _ = run(capsys, "expand", "--ricci", "flat", "--radii", "zzz")
    assert code == 2
