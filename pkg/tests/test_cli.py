import json
import math

import pytest

from sbmpot import PhiSpec, RunConfig, load_report
from sbmpot.cli import main


def _run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def test_phi_show_round_trips(capsys):
    rc, out, _ = _run(capsys, "phi", "show")
    assert rc == 0
    assert PhiSpec.from_json(out) == PhiSpec.stable(0.75)


def test_phi_eval_values(capsys):
    rc, out, _ = _run(capsys, "phi", "eval", "--lam", "1.0,4.0")
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "lam,phi"
    vals = [float(line.split(",")[1]) for line in lines[1:]]
    assert vals[0] == pytest.approx(1.0, rel=1e-12)
    assert vals[1] == pytest.approx(4.0 ** 0.75, rel=1e-12)


def test_phi_scaling_recovers_pure_power(capsys):
    rc, out, _ = _run(capsys, "phi", "scaling")
    assert rc == 0
    rep = json.loads(out)
    assert rep["delta1_hat"] == pytest.approx(0.75, abs=1e-9)
    assert rep["delta2_hat"] == pytest.approx(0.75, abs=1e-9)


def test_kernel_table_h(capsys):
    rc, out, _ = _run(capsys, "kernel", "table", "--what", "h", "--xs", "1.0")
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "x,value"
    assert float(lines[1].split(",")[1]) == pytest.approx(
        math.sqrt(2.0 / math.pi), rel=1e-9
    )


def test_kernel_table_gz_needs_y(capsys):
    rc, _, err = _run(capsys, "kernel", "table", "--what", "gz", "--xs", "1.0")
    assert rc == 2
    assert "error:" in err


def test_kernel_table_bad_list(capsys):
    rc, _, err = _run(capsys, "kernel", "table", "--what", "h", "--xs", "1.0,oops")
    assert rc == 2
    assert "error:" in err


def test_quad_selftest(capsys):
    rc, out, _ = _run(capsys, "quad", "selftest")
    assert rc == 0
    lines = out.strip().splitlines()
    assert len(lines) == 4
    assert all(line.startswith("PASS") for line in lines)


def test_solve_green(capsys, tmp_path):
    out_file = tmp_path / "green.csv"
    rc, out, _ = _run(
        capsys, "solve", "green", "--a", "1", "--b", "2", "--n", "64",
        "--process", "x", "--out", str(out_file),
    )
    assert rc == 0
    diag = json.loads(out)
    assert diag["kind"] == "green-X"
    assert diag["value"] > 0.0
    assert diag["refinement_drift"] is not None and diag["refinement_drift"] < 0.2
    assert len(out_file.read_text().strip().splitlines()) == 65


def test_solve_exit(capsys, tmp_path):
    out_file = tmp_path / "exit.csv"
    rc, out, _ = _run(
        capsys, "solve", "exit", "--R", "1", "--x", "0.5",
        "--aseq", "0.04,0.02,0.01", "--out", str(out_file),
    )
    assert rc == 0
    diag = json.loads(out)
    assert 0.0 < diag["value"][0] < 1.0
    assert diag["bracket"][0] < 0.1
    assert diag["refinement_drift"] is not None
    lines = out_file.read_text().strip().splitlines()
    assert lines[0] == "x,value,lower,upper,width"
    assert len(lines) == 2


def test_solve_harnack(capsys):
    rc, out, _ = _run(capsys, "solve", "harnack", "--r", "1", "--n", "128")
    assert rc == 0
    diag = json.loads(out)
    assert diag["value"] > 1.0
    assert diag["refinement_drift"] is not None


def test_solve_bhp(capsys):
    rc, out, _ = _run(capsys, "solve", "bhp", "--r", "1", "--n", "256")
    assert rc == 0
    diag = json.loads(out)
    assert diag["value"] > 1.0
    assert diag["bracket"][1] >= diag["bracket"][0] == diag["value"]
    # n//2 = 128 cannot hold the default shelf, so no companion run
    assert diag["refinement_drift"] is None


def test_solve_small(capsys):
    rc, out, _ = _run(capsys, "solve", "small", "--R", "1", "--n", "128")
    assert rc == 0
    diag = json.loads(out)
    assert diag["value"] > 0.0


def test_mc_exit(capsys, tmp_path):
    out_file = tmp_path / "paths.csv"
    rc, out, _ = _run(
        capsys, "mc", "exit", "--a", "1", "--b", "2", "--x0", "1.5",
        "--dt", "1e-2", "--paths", "500", "--seed", "7", "--out", str(out_file),
    )
    assert rc == 0
    summary = json.loads(out)
    v = summary["value"]
    assert v["n_exited"] + v["censored"] == 500
    assert 0.0 < v["frac_low"] < 1.0
    assert v["mean_exit_time"] > 0.0
    lines = out_file.read_text().strip().splitlines()
    assert len(lines) == 501
    assert lines[0] == "exit_time,exit_position,side,censored"


def test_verify_one(capsys, tmp_path):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps(RunConfig(specs=(PhiSpec.stable(0.75),)).to_dict()))
    out_file = tmp_path / "report.json"
    rc, out, _ = _run(
        capsys, "verify", "one", "--name", "h-value",
        "--config", str(cfg_file), "--out", str(out_file),
    )
    assert rc == 0
    assert out.startswith("PASS")
    assert "1 checks, 0 failed" in out
    rep = load_report(out_file)
    assert len(rep.checks) == 1 and rep.checks[0].passed


def test_verify_one_csv_format_inferred(capsys, tmp_path):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps(RunConfig(specs=(PhiSpec.stable(0.75),)).to_dict()))
    out_file = tmp_path / "report.csv"
    rc, _, _ = _run(
        capsys, "verify", "one", "--name", "h-value",
        "--config", str(cfg_file), "--out", str(out_file),
    )
    assert rc == 0
    assert out_file.read_text().startswith("check,constant,value,tol,pass,runtime")


def test_verify_rejects_unknown_name(capsys):
    rc, _, err = _run(capsys, "verify", "one", "--name", "no-such-check")
    assert rc == 2
    assert "error:" in err


def test_verify_rejects_bad_config(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    rc, _, err = _run(capsys, "verify", "one", "--name", "h-value", "--config", str(bad))
    assert rc == 2
    assert "error:" in err

    empty = tmp_path / "empty.json"
    empty.write_text(json.dumps({"specs": []}))
    rc, _, err = _run(capsys, "verify", "one", "--name", "h-value", "--config", str(empty))
    assert rc == 2
    assert "error:" in err


def test_missing_spec_file(capsys, tmp_path):
    rc, _, err = _run(capsys, "phi", "show", "--spec", str(tmp_path / "none.json"))
    assert rc == 2
    assert "error:" in err
