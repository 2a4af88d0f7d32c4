import json
import os
from pathlib import Path

from momentsieve.cli import main

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def run(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_synthetic_two_real_zeros(capsys):
    code, out, _ = run(["synthetic", str(FIXTURES / "real_23.zeros"),
                        "--L", "1", "--nmax", "4", "--kmax", "4",
                        "--bits", "128"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["admissibility"]["accepted"] is True
    assert report["grid"]["verdict"] == "no violation up to (4,4)"
    assert report["grid"]["counts"]["negative"] == 0
    # round trip between the recursion and the direct zero sums
    assert float(report["roundtrip"]["max_rel_residual"]) < 1e-20


def test_synthetic_wide_pair_violates(capsys):
    code, out, _ = run(["synthetic", str(FIXTURES / "wide_pair.zeros"),
                        "--L", "1", "--nmax", "3", "--kmax", "3",
                        "--bits", "128"], capsys)
    assert code == 2
    report = json.loads(out)
    assert report["grid"]["first_violation"] == [0, 0]
    assert report["grid"]["verdict"] == "criterion fails at (0,0)"


def test_synthetic_malformed_fixture(tmp_path, capsys):
    bad = tmp_path / "bad.zeros"
    bad.write_text("not a number\n")
    code, _, err = run(["synthetic", str(bad)], capsys)
    assert code == 1
    assert "error" in err


def test_synthetic_missing_file(capsys):
    code, _, err = run(["synthetic", "/nonexistent/zeros.txt"], capsys)
    assert code == 1


def test_xi_pipeline_auto(capsys):
    code, out, _ = run(["xi", "--N", "10", "--nmax", "3", "--kmax", "3",
                        "--bits", "128"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["grid"]["counts"]["negative"] == 0
    assert abs(float(report["s1"]) - 14.134725) < 1e-4
    assert len(report["coefficients"]) == 11
    assert len(report["brackets"]) >= 1


def test_xi_rejects_scale_below_constraint(capsys):
    code, _, err = run(["xi", "--N", "10", "--nmax", "3", "--kmax", "3",
                        "--L", "0.001", "--bits", "96"], capsys)
    assert code == 1
    assert "s_1" in err


def test_xi_rejects_small_N(capsys):
    code, _, err = run(["xi", "--N", "6", "--nmax", "4", "--kmax", "4",
                        "--bits", "96"], capsys)
    assert code == 1
    assert "N >= 10" in err


def test_dirichlet_q3(capsys):
    code, out, _ = run(["dirichlet", "--q", "3", "--N", "6",
                        "--nmax", "2", "--kmax", "2", "--bits", "128"],
                       capsys)
    assert code == 0
    report = json.loads(out)
    assert report["q"] == 3 and report["index"] == 1
    assert report["parity"] == 1
    assert report["conductor"] == 3
    assert report["eq331_status"] == "holds for n <= 6"
    assert report["grid"]["counts"]["negative"] == 0
    assert report["mu"] == 0
    assert abs(float(report["s1"]) - 8.039737) < 1e-3


def test_dirichlet_q4_runs_clean(capsys):
    code, out, _ = run(["dirichlet", "--q", "4", "--N", "6",
                        "--nmax", "2", "--kmax", "2", "--bits", "128"],
                       capsys)
    assert code == 0
    report = json.loads(out)
    assert report["verdict"].startswith("no violation")
    # root number +1 keeps the kernel even, so the center coefficient
    # survives and mu stays 0
    assert report["mu"] == 0


def test_dirichlet_nonprimitive_rejected(capsys):
    code, _, err = run(["dirichlet", "--q", "6", "--index", "1",
                        "--N", "6", "--nmax", "2", "--kmax", "2"], capsys)
    assert code == 1
    assert "conductor 3" in err


def test_char_table(capsys):
    code, out, _ = run(["char-table", "--q", "8"], capsys)
    assert code == 0
    report = json.loads(out)
    assert len(report["characters"]) == 4
    prim = [c for c in report["characters"] if c["primitive"]]
    assert {c["conductor"] for c in prim} == {8}

    code, out, _ = run(["char-table", "--q", "8", "--format", "csv"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "index,order,parity,conductor,primitive,tau_re,tau_im"
    assert len(lines) == 5


def test_csv_grid_export(capsys):
    code, out, _ = run(["synthetic", str(FIXTURES / "real_23.zeros"),
                        "--L", "1", "--nmax", "2", "--kmax", "2",
                        "--bits", "96", "--format", "csv"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,k,value,sign"
    assert len(lines) == 10
    assert all(line.endswith("positive") for line in lines[1:])


def test_env_var_sets_default_bits(capsys, monkeypatch):
    monkeypatch.setenv("MOMENT_SIEVE_BITS", "96")
    code, out, _ = run(["synthetic", str(FIXTURES / "real_23.zeros"),
                        "--L", "1", "--nmax", "2", "--kmax", "2"], capsys)
    assert code == 0
    assert json.loads(out)["bits"] == 96
    monkeypatch.setenv("MOMENT_SIEVE_BITS", "not-a-number")
    code, _, err = run(["synthetic", str(FIXTURES / "real_23.zeros")], capsys)
    assert code == 1


def test_reports_are_deterministic(tmp_path, capsys):
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    for out in (out1, out2):
        code, _, _ = run(["synthetic", str(FIXTURES / "wide_pair.zeros"),
                          "--L", "1", "--nmax", "3", "--kmax", "3",
                          "--bits", "128", "--out", str(out)], capsys)
        assert code == 2
    assert out1.read_bytes() == out2.read_bytes()


def test_usage_error_exit_code(capsys):
    code, _, _ = run(["no-such-command"], capsys)
    assert code == 1
    code, _, _ = run([], capsys)
    assert code == 1
