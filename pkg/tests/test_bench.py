import math

import numpy as np
import pytest

from fcrk.bench import (
    ConvergenceRow,
    InsufficientDataError,
    TableauFormatError,
    emit_csv,
    emit_solution_csv,
    estimate_order,
    parse_csv,
    parse_tableau,
    run_convergence,
    sample_error,
    serialize_tableau,
)
from fcrk.problems import get_problem, quadrature_problem
from fcrk.stepper import IntegrationConfig, integrate
from fcrk.tableau import MethodId, builtin

EPS = np.finfo(float).eps


def test_sample_error_quadrature_is_roundoff_level():
    prob = quadrature_problem(3, "first")
    trace, _ = integrate(prob, builtin(MethodId.FCRK3R), IntegrationConfig(h=1 / 64, t_end=1.0))
    err, errp = sample_error(trace, prob.exact, 16)
    assert err <= 50 * EPS
    assert errp is None  # first-order trace has no derivative output


def test_sample_error_mesh_only():
    prob = get_problem("p1")
    trace, _ = integrate(prob, builtin(MethodId.FCRK3R), IntegrationConfig(h=1 / 16, t_end=1.0))
    mesh_err, _ = sample_error(trace, prob.exact, 1)
    dense_err, _ = sample_error(trace, prob.exact, 16)
    assert 0 < mesh_err <= dense_err
    with pytest.raises(ValueError):
        sample_error(trace, prob.exact, 0)


def test_sample_error_order3_ratio_on_p2():
    prob = get_problem("p2")
    errs = {}
    for h in (1 / 64, 1 / 128):
        trace, _ = integrate(prob, builtin(MethodId.FCRK3R), IntegrationConfig(h=h, t_end=0.5))
        errs[h], _ = sample_error(trace, prob.exact, 16)
    ratio = errs[1 / 64] / errs[1 / 128]
    assert 2**2.5 <= ratio <= 2**3.5


def test_sample_error_derivative_tracking():
    prob = get_problem("p3")
    trace, _ = integrate(prob, builtin(MethodId.FCRKN3R), IntegrationConfig(h=1 / 32, t_end=3.0))
    err, errp = sample_error(trace, prob.exact, 16, exact_derivative=prob.exact_derivative)
    assert err > 0 and errp is not None and errp > 0


def test_run_convergence_rows_and_accounting():
    prob = get_problem("p1")
    h_list = [2.0**-k for k in range(3, 9)]
    rows = run_convergence(prob, MethodId.FCRK3R, h_list)
    assert len(rows) == 6
    for row, h in zip(rows, h_list):
        assert row.h == h
        assert row.method == "fcrk3r"
        assert row.problem == "p1"
        assert row.nf == 3 * row.steps + 1
        assert row.errp is None

    rows4 = run_convergence(get_problem("p4"), MethodId.FCRKN4R, [2.0**-k for k in range(4, 10)])
    assert all(r.errp is not None for r in rows4)

    assert run_convergence(prob, MethodId.FCRK3R, []) == []


def test_run_convergence_records_failures_as_nan():
    import numpy as _np

    from fcrk.history import HistorySpec
    from fcrk.problems import RfdeProblem

    # a right-hand side that blows up past t = 0.3 fails every run; the rows
    # must record the failure instead of raising
    spec = HistorySpec(t0=0.0, r=0.0, phi=lambda t: _np.array([1.0]))
    bad = RfdeProblem(
        name="blowup",
        history=spec,
        rhs=lambda t, u: _np.array([math.inf if t > 0.3 else 1.0]),
        exact=lambda t: _np.array([1.0]),
        default_span=(0.0, 1.0),
    )
    rows = run_convergence(bad, MethodId.FCRK3R, [0.5, 0.25])
    assert [math.isnan(r.err) for r in rows] == [True, True]
    assert [r.steps for r in rows] == [2, 4]
    with pytest.raises(InsufficientDataError):
        estimate_order(rows)
    # an h that does not divide the span violates the sweep precondition
    with pytest.raises(ValueError):
        run_convergence(get_problem("p1"), MethodId.FCRK3R, [0.3])


def test_estimate_order_synthetic():
    rows = [ConvergenceRow("m", "p", h, 1, 1, 7 * h**3) for h in [0.1 * 2.0**-k for k in range(6)]]
    est = estimate_order(rows)
    assert abs(est.slope - 3.0) < 1e-9
    assert est.points_used == 3
    assert math.exp(est.intercept) == pytest.approx(7.0, rel=1e-6)

    rows2 = [ConvergenceRow("m", "p", h, 1, 1, h**3 + h**5) for h in [0.5 * 2.0**-k for k in range(6)]]
    assert 2.9 < estimate_order(rows2).slope < 3.1


def test_estimate_order_requires_two_usable_rows():
    with pytest.raises(InsufficientDataError):
        estimate_order([ConvergenceRow("m", "p", 0.1, 1, 1, 1e-3)])
    nan_rows = [
        ConvergenceRow("m", "p", 0.1, 1, 1, 1e-3),
        ConvergenceRow("m", "p", 0.05, 1, 1, math.nan),
    ]
    with pytest.raises(InsufficientDataError):
        estimate_order(nan_rows)


def test_estimate_order_excludes_nonfinite_rows():
    rows = [ConvergenceRow("m", "p", h, 1, 1, h**2) for h in [0.2, 0.1, 0.05, 0.025]]
    rows.insert(0, ConvergenceRow("m", "p", 0.4, 1, 1, math.nan))
    est = estimate_order(rows)
    assert abs(est.slope - 2.0) < 1e-9


def test_emit_csv_schema_and_roundtrip():
    assert emit_csv([]) == "method,problem,h,steps,nf,err,errp\n"
    rows = [
        ConvergenceRow("fcrk3r", "p1", 0.125, 8, 25, 1.25e-4, None),
        ConvergenceRow("fcrkn4r", "p4", 1 / 3, 3, 13, 9.876543210987654e-10, 0.1 + 0.2),
    ]
    text = emit_csv(rows)
    lines = text.splitlines()
    assert lines[1].endswith(",")  # empty errp field for first-order rows
    assert parse_csv(text) == rows  # bitwise float round-trip
    assert emit_csv(rows) == text  # deterministic


def test_parse_csv_rejects_garbage():
    with pytest.raises(ValueError):
        parse_csv("nope\n")
    with pytest.raises(ValueError):
        parse_csv("method,problem,h,steps,nf,err,errp\na,b,c\n")


def test_emit_solution_csv_shapes():
    prob = get_problem("p1")
    trace, _ = integrate(prob, builtin(MethodId.FCRK3R), IntegrationConfig(h=0.25, t_end=1.0))
    text = emit_solution_csv(trace, 4)
    lines = text.splitlines()
    assert lines[0] == "t,u0"
    assert len(lines) == 1 + 4 * 4 + 1  # header + 4 samples per step + final point
    assert float(lines[-1].split(",")[0]) == 1.0

    p3 = get_problem("p3")
    trace3, _ = integrate(p3, builtin(MethodId.FCRKN3R), IntegrationConfig(h=0.5, t_end=3.0))
    assert emit_solution_csv(trace3, 2).splitlines()[0] == "t,u0,du0"


def test_reuse_advantage_same_error_fewer_evaluations():
    prob = get_problem("p2")
    h_list = [1 / 32, 1 / 64]
    rows_on = run_convergence(prob, MethodId.FCRK3R, h_list, reuse=True)
    rows_off = run_convergence(prob, MethodId.FCRK3R, h_list, reuse=False)
    scale = math.exp(0.0)  # solution magnitude is <= 1 on this problem
    for on, off in zip(rows_on, rows_off):
        assert abs(on.err - off.err) <= 10 * EPS * scale
        assert on.nf < off.nf


def test_custom_tableau_file_matches_builtin(tmp_path):
    for mid in MethodId:
        t = builtin(mid)
        path = tmp_path / f"{mid.value}.tab"
        path.write_text(serialize_tableau(t))
        assert parse_tableau(path.read_text()) == t


def test_parse_tableau_errors():
    with pytest.raises(TableauFormatError):
        parse_tableau("")
    with pytest.raises(TableauFormatError):
        parse_tableau("rk4 3\n0 1/2 1\n")
    with pytest.raises(TableauFormatError):
        parse_tableau("fcrk 3\n0 1/2\n[0,1]\nb: [0,1] [0,1] [0,1]\n")  # c count
    good3 = serialize_tableau(builtin(MethodId.FCRKN3R))
    with pytest.raises(TableauFormatError):
        parse_tableau(good3.replace("bp:", "bq:"))
    with pytest.raises(TableauFormatError):
        parse_tableau("fcrk 2\n0 1\n[0,1/0]\nb: [0,1] []\n")  # zero denominator
    with pytest.raises(TableauFormatError):
        parse_tableau("fcrk 2\n0 1\n[0,x]\nb: [0,1] []\n")
    with pytest.raises(TableauFormatError):
        parse_tableau("fcrk 2\n0 1\n[0,1] stray\nb: [0,1] []\n")


def test_parse_tableau_accepts_exact_decimal_coefficients():
    # Fraction("0.5") is the exact rational 1/2; decimals stay exact
    t = parse_tableau("fcrk 2\n0 1\n[0,0.5]\nb: [0,0.25] [0,0.75]\n")
    assert t.A[1][0](1) == pytest.approx(0.5)
    assert float(t.b[0].coeffs[1]) == 0.25


def test_parse_tableau_allows_comments_and_blank_lines():
    text = serialize_tableau(builtin(MethodId.FCRK3R))
    noisy = "# reuse method\n\n" + text.replace("\nb:", "\n# weights\nb:")
    assert parse_tableau(noisy) == builtin(MethodId.FCRK3R)
