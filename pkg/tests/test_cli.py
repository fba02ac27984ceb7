import csv
import io
import subprocess
import sys

import pytest

from elasticmg.cli import build_parser, main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, list(csv.DictReader(io.StringIO(out)))


def test_lfa_smoothing_rows(capsys):
    code, rows = run(["lfa-smoothing"], capsys)
    assert code == 0 and len(rows) == 6
    assert {r["nu"] for r in rows} == {"0.45", "0.4999999"}
    vanka = [r for r in rows if r["scheme"] == "vanka"]
    assert all(abs(float(r["mu_opt"]) - 0.28) < 1e-3 for r in vanka)


def test_lfa_twogrid_single(capsys):
    code, rows = run(["lfa-twogrid", "--scheme", "vanka", "--nu", "0.45", "--gamma", "1",
                      "--freq-samples", "32"], capsys)
    assert code == 0 and len(rows) == 1
    assert abs(float(rows[0]["rho"]) - 0.28) < 0.01


def test_solve_and_history(tmp_path, capsys):
    hist = tmp_path / "h.csv"
    code, rows = run(["solve", "--scheme", "mass", "--n", "16", "--cycle", "w",
                      "--history-out", str(hist)], capsys)
    assert code == 0 and rows[0]["converged"] == "true"
    h = list(csv.DictReader(hist.open()))
    assert len(h) == int(rows[0]["iterations"]) + 1
    assert float(h[0]["relative_residual"]) == 1.0


def test_solve_is_deterministic(capsys):
    argv = ["solve", "--scheme", "jacobi", "--n", "16", "--seed", "5"]
    a = run(argv, capsys)[1]
    b = run(argv, capsys)[1]
    assert a == b


def test_convergence_order(tmp_path, capsys):
    out = tmp_path / "o.csv"
    assert main(["convergence-order", "--n-list", "8", "16", "32", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 3 and float(rows[-1]["order_p"]) > 1.9


@pytest.mark.parametrize("argv", [
    ["solve", "--n", "12"],
    ["solve", "--omega", "2.5"],
    ["solve", "--pre", "0", "--post", "0"],
    ["lfa-smoothing", "--nu", "0.5"],
    ["lfa-twogrid", "--freq-samples", "8"],
    ["lfa-smoothing", "--epsilon", "-1"],
    ["frobnicate"],
    [],
])
def test_bad_arguments_exit_2(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_descending_n_list_rejected():
    with pytest.raises(SystemExit):
        main(["convergence-order", "--n-list", "16", "8"])


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "elasticmg", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "lfa-twogrid" in res.stdout


def test_parser_defaults():
    args = build_parser().parse_args(["solve"])
    assert args.cycle == "v" and args.schur == "jacobi" and args.max_sweeps == 3 and args.schur_tol == 0.1
