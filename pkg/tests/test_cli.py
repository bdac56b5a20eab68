import shutil
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

import behavineq
from behavineq import artifacts
from behavineq import model as M
from behavineq.cli import main
from behavineq.feasibility import decide, verify_certificate, verify_witness
from behavineq.trajectory import from_csv, read_csv_table

CORPUS = Path(behavineq.__file__).parent / "corpus"


@pytest.fixture
def corpus(tmp_path):
    dst = tmp_path / "corpus"
    shutil.copytree(CORPUS, dst)
    return dst


@pytest.mark.parametrize("name, code, word", [
    ("example2", 0, "FEASIBLE"),
    ("example4_lti", 1, "INFEASIBLE"),
    ("inventory", 0, "FEASIBLE"),
    ("example1", 0, "FEASIBLE"),
    ("example3_slack", 0, "FEASIBLE"),
])
def test_check_verdicts(corpus, capsys, name, code, word):
    assert main(["check", str(corpus / f"{name}.bsys")]) == code
    assert capsys.readouterr().out.splitlines()[0] == word


def test_check_writes_verifiable_certificate(corpus, capsys):
    model = corpus / "example4_lti.bsys"
    main(["check", str(model)])
    path = corpus / "example4_lti.certificate.csv"
    cert = artifacts.certificate_from_csv(path.read_text())
    assert cert.objective < 0
    assert verify_certificate(M.load_model(model), cert)
    assert main(["verify", str(model), "--certificate", str(path)]) == 0
    assert "VALID" in capsys.readouterr().out


def test_check_writes_verifiable_witness(corpus):
    model = corpus / "inventory.bsys"
    main(["check", str(model)])
    w = artifacts.witness_from_csv((corpus / "inventory.witness.csv").read_text())
    assert verify_witness(M.load_model(model), w)
    assert main(["verify", str(model), "--witness", str(corpus / "inventory.witness.csv")]) == 0


def test_verify_rejects_bad_witness(corpus, tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("# extension=quasi-constant dim=1 constant=3\nk,w\n0,3\n")
    assert main(["verify", str(corpus / "example1.bsys"), "--witness", str(bad)]) == 4
    assert "INVALID" in capsys.readouterr().out


def test_check_csv_format(corpus, capsys):
    main(["--format", "csv", "check", str(corpus / "example4_lti.bsys")])
    _, cols, rows = read_csv_table(capsys.readouterr().out)
    table = dict(rows)
    assert cols == ["key", "value"]
    assert table["verdict"] == "INFEASIBLE" and Fraction(table["objective"]) < 0


def test_check_unknown_exit_code(tmp_path, capsys):
    model = tmp_path / "ramp.bsys"
    model.write_text("[ineq]\ns - 1 <= -1\n")
    assert main(["check", str(model)]) == 3
    assert capsys.readouterr().out.startswith("UNKNOWN")


def test_check_parse_error_exit_code(tmp_path, capsys):
    model = tmp_path / "bad.bsys"
    model.write_text("[vars]\nw\n[ineq]\ns^ <= 1\n")
    assert main(["check", str(model)]) == 2
    assert "line 4, column 3" in capsys.readouterr().err


def test_missing_file_exit_code(tmp_path):
    assert main(["check", str(tmp_path / "nope.bsys")]) == 2


def test_budget_flags_and_env(corpus, capsys, monkeypatch):
    model = str(corpus / "example4_lti.bsys")
    assert main(["check", model, "--window-max", "1", "--periods", "1"]) == 3
    capsys.readouterr()
    monkeypatch.setenv("BEHAVINEQ_BUDGET", "window-max=1 periods=1")
    assert main(["check", model]) == 3
    assert main(["check", model, "--window-max", "2"]) == 1
    assert main(["check", model, "--periods", "0"]) == 2


def test_jobs_flag_same_verdict(corpus, capsys):
    model = str(corpus / "example4_lti.bsys")
    assert main(["check", model, "--jobs", "2"]) == 1
    out = capsys.readouterr().out
    assert "schedule: witness:1 certificate:1 witness:2 certificate:2" in out


def test_reduce_example2_adjoint(corpus, capsys):
    assert main(["reduce", str(corpus / "example2.bsys"), "--target", "adjoint"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("rank: 2\n")
    assert "T =" in out


def test_reduce_identity(capsys):
    main(["reduce", "--matrix", "1 | 0 ; 0 | 1"])
    out = capsys.readouterr().out
    assert "U =\n[ 1  0 ]\n[ 0  1 ]\nT =\n[ 1  0 ]\n[ 0  1 ]" in out


def test_reduce_example3_slack(corpus, capsys):
    main(["reduce", str(corpus / "example2.bsys"), "--target", "slack"])
    assert capsys.readouterr().out.startswith("rank: 2\npivot columns: 1, 2\n")


def test_reduce_csv(capsys):
    main(["--format", "csv", "reduce", "--matrix", "s + 1 | 1 ; 1 | s"])
    _, cols, rows = read_csv_table(capsys.readouterr().out)
    assert cols == ["matrix", "row", "col", "entry"]
    assert ["rank", "", "", "2"] in rows


def test_reduce_needs_input():
    assert main(["reduce"]) == 2


def test_rollout_slack_zero(corpus, capsys):
    main(["rollout", str(corpus / "example1.bsys"), "--initial",
          str(corpus / "example1_initial.csv"), "--slack", str(corpus / "example1_slack_zero.csv"),
          "--horizon", "5"])
    w = from_csv(capsys.readouterr().out)
    assert w.value_at(3) == (2,)
    assert [v[0] for v in w.values] == [1, 1, 2, 3, 3, 2]


def test_rollout_footprint(corpus, capsys):
    main(["rollout", str(corpus / "example1.bsys"), "--footprint", "--start", "1"])
    lines = [x for x in capsys.readouterr().out.splitlines() if not x.startswith("#")]
    assert lines == ["variable,k", "w,1", "w,2"]


def test_rollout_zero_system(tmp_path, capsys):
    model = tmp_path / "zero.bsys"
    model.write_text("[ineq]\n1 <= 0\n")
    assert main(["rollout", str(model), "--horizon", "3"]) == 0
    w = from_csv(capsys.readouterr().out)
    assert all(v == (0,) for v in w.values)


def test_rollout_errors(corpus, tmp_path):
    assert main(["rollout", str(corpus / "example1.bsys"), "--horizon", "3"]) == 2
    assert main(["rollout", str(corpus / "example4_lti.bsys")]) == 2
    bad = tmp_path / "init.csv"
    bad.write_text("k,v\n1,1\n")
    assert main(["rollout", str(corpus / "example1.bsys"), "--initial", str(bad)]) == 2


def test_quiver_points(corpus, capsys):
    main(["quiver", str(corpus / "example4_lti.bsys"), "--grid", "0:1:2,0:1:2"])
    _, cols, rows = read_csv_table(capsys.readouterr().out)
    field = {(r[1], r[2]): (r[3], r[4]) for r in rows if r[0] == "field"}
    assert field[("1", "0")] == ("1", "1")
    assert field[("0", "0")] == ("0", "0")
    corners = [(r[1], r[2]) for r in rows if r[0] == "corner"]
    assert corners == [("1", "-5"), ("5", "-5"), ("5", "5"), ("1", "5")]


def test_quiver_rejects_non_planar(corpus):
    assert main(["quiver", str(corpus / "inventory.bsys")]) == 2


@pytest.mark.parametrize("traj, cost, expected", [
    ("inventory_u2.csv", "inventory_c1.csv", "10"),
    ("inventory_u0.csv", "inventory_c1.csv", "0"),
    ("inventory_u1.csv", "inventory_c123.csv", "6"),
])
def test_cost(corpus, capsys, traj, cost, expected):
    assert main(["cost", str(corpus / "inventory.bsys"), "--trajectory", str(corpus / traj),
                 "--cost", str(corpus / cost)]) == 0
    assert capsys.readouterr().out.strip() == expected


def test_cost_window_mismatch(corpus):
    assert main(["cost", str(corpus / "inventory.bsys"), "--trajectory",
                 str(corpus / "inventory_u2.csv"), "--cost",
                 str(corpus / "inventory_c123.csv")]) == 2
    assert main(["cost", str(corpus / "inventory.bsys"), "--trajectory",
                 str(corpus / "inventory_u2.csv"), "--cost", str(corpus / "inventory_c1.csv"),
                 "--variable", "z"]) == 2


def test_certificate_csv_round_trip():
    sys = M.example4()
    v = decide(sys)
    text = artifacts.certificate_to_csv(v.certificate, sys.n_eq, sys.n_ineq)
    back = artifacts.certificate_from_csv(text)
    assert back == v.certificate


def test_certificate_from_csv_rejects_other_files():
    with pytest.raises(ValueError):
        artifacts.certificate_from_csv("k,c1\n0,1\n")


def test_grid_points():
    pts = artifacts.grid_points("1:5:5,-5:5:3")
    assert len(pts) == 15 and pts[0] == (1, -5) and pts[-1] == (5, 5)
    with pytest.raises(ValueError):
        artifacts.grid_points("1:5")
    with pytest.raises(ValueError):
        artifacts.grid_points("1:5:0,1:2:2")


def test_run_report_rows():
    r = artifacts.RunReport("check x", "abc", "infeasible", certificate_path="x.csv",
                            objective=Fraction(-1), schedule=["witness:1"])
    assert r.text().splitlines()[0] == "INFEASIBLE"
    assert "certificate,x.csv" in r.csv()


def test_module_entry_point(tmp_path):
    shutil.copy(CORPUS / "example2.bsys", tmp_path / "example2.bsys")
    proc = subprocess.run([sys.executable, "-m", "behavineq", "check",
                           str(tmp_path / "example2.bsys")], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("FEASIBLE")
