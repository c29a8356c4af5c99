import re

import pytest

from fcrk.bench import parse_csv, serialize_tableau
from fcrk.cli import cli_main
from fcrk.tableau import MethodId, builtin


def run_cli(capsys, *argv):
    code = cli_main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.mark.parametrize("mid", [m.value for m in MethodId])
def test_check_certifies_builtins(capsys, mid):
    code, out, _ = run_cli(capsys, "check", "--method", mid)
    assert code == 0
    assert "CERTIFIED" in out


def test_check_fcrkn3r_report_text(capsys):
    code, out, _ = run_cli(capsys, "check", "--method", "fcrkn3r")
    assert code == 0
    assert "uniform order 3" in out
    assert "structural diagnostics: none" in out


def test_check_fcrkn4r_surfaces_diagnostics_but_certifies(capsys):
    code, out, _ = run_cli(capsys, "check", "--method", "fcrkn4r")
    assert code == 0
    assert "transcription suspects" in out
    assert "reuse integral mismatch" in out
    assert "uniform order 4" in out


def test_check_custom_file(capsys, tmp_path):
    path = tmp_path / "m.tab"
    path.write_text(serialize_tableau(builtin(MethodId.FCRK3R)))
    code, out, _ = run_cli(capsys, "check", "--method", str(path))
    assert code == 0
    assert "uniform quadrature order: 3" in out


def test_unknown_method_and_problem_exit_2(capsys):
    code, _, err = run_cli(capsys, "check", "--method", "fcrk9r")
    assert code == 2 and "unknown method" in err
    code, _, err = run_cli(capsys, "solve", "--method", "fcrk3r", "--problem", "p9", "--h", "0.125")
    assert code == 2 and "unknown problem" in err


def test_malformed_flags_exit_2(capsys):
    assert run_cli(capsys, "solve", "--method", "fcrk3r")[0] == 2  # missing required
    assert run_cli(capsys, "frobnicate")[0] == 2


def test_method_problem_kind_mismatch_exit_2(capsys):
    code, _, err = run_cli(capsys, "solve", "--method", "fcrk3r", "--problem", "p3", "--h", "0.25")
    assert code == 2 and "mismatch" in err


def test_solve_writes_dense_csv(capsys, tmp_path):
    out = tmp_path / "dense.csv"
    code, stdout, _ = run_cli(
        capsys, "solve", "--method", "fcrk3r", "--problem", "p1", "--h", "0.125",
        "--samples", "4", "--out", str(out),
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t,u0"
    assert len(lines) == 1 + 8 * 4 + 1
    assert "err=" in stdout


def test_solve_stdout_and_summary_on_stderr(capsys):
    code, stdout, stderr = run_cli(
        capsys, "solve", "--method", "fcrkn3r", "--problem", "p3", "--h", "0.5", "--samples", "2"
    )
    assert code == 0
    assert stdout.splitlines()[0] == "t,u0,du0"
    assert "errp=" in stderr


def test_solve_t_end_override_and_breakpoints(capsys):
    code, stdout, stderr = run_cli(
        capsys, "solve", "--method", "fcrk3r", "--problem", "p1", "--h", "0.125",
        "--t-end", "0.5", "--breakpoints", "0.25",
    )
    assert code == 0
    assert "steps=4" in stderr


def test_solve_bad_step_exit_2(capsys):
    code, _, err = run_cli(capsys, "solve", "--method", "fcrk3r", "--problem", "p1", "--h", "0.3")
    assert code == 2 and "not an integer" in err


def test_converge_slope_printed_and_in_range(capsys):
    code, stdout, stderr = run_cli(
        capsys, "converge", "--method", "fcrk3r", "--problem", "p1",
        "--h-start", "0.125", "--levels", "6",
    )
    assert code == 0
    rows = parse_csv(stdout)
    assert len(rows) == 6
    assert rows[0].nf == 3 * rows[0].steps + 1
    m = re.search(r"slope\(err\) = ([0-9.]+)", stderr)
    assert m, stderr
    assert 2.7 <= float(m.group(1)) <= 3.3


def test_converge_deterministic_output(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        code, _, _ = run_cli(
            capsys, "converge", "--method", "fcrkn3r", "--problem", "p4",
            "--h-start", "0.125", "--levels", "3", "--out", str(path),
        )
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_converge_errp_slope_for_nystrom(capsys):
    code, stdout, stderr = run_cli(
        capsys, "converge", "--method", "fcrkn3r", "--problem", "p4",
        "--h-start", "0.125", "--levels", "4",
    )
    assert code == 0
    assert "slope(errp)" in stderr
    rows = parse_csv(stdout)
    assert all(r.errp is not None for r in rows)


def test_converge_no_reuse_costs_more(capsys):
    _, out_on, _ = run_cli(
        capsys, "converge", "--method", "fcrk3r", "--problem", "p2",
        "--h-start", "0.0625", "--levels", "2",
    )
    _, out_off, _ = run_cli(
        capsys, "converge", "--method", "fcrk3r", "--problem", "p2",
        "--h-start", "0.0625", "--levels", "2", "--no-reuse",
    )
    on, off = parse_csv(out_on), parse_csv(out_off)
    for r_on, r_off in zip(on, off):
        assert r_off.nf > r_on.nf
        assert r_off.err == r_on.err  # identical trajectories


def test_converge_with_custom_tableau_file(capsys, tmp_path):
    path = tmp_path / "fcrk3r.tab"
    path.write_text(serialize_tableau(builtin(MethodId.FCRK3R)))
    code, stdout, _ = run_cli(
        capsys, "converge", "--method", str(path), "--problem", "p1",
        "--h-start", "0.25", "--levels", "2",
    )
    assert code == 0
    rows = parse_csv(stdout)
    assert rows[0].method == "custom"
