"""Command-line front end: order-condition reports, single solves with dense
sampling, and constant-step convergence sweeps with slope estimation.

Exit codes: 0 success (for `check`: the claimed order is certified),
1 integrator/measurement failure, 2 usage errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import (
    InsufficientDataError,
    emit_csv,
    emit_solution_csv,
    estimate_order,
    parse_tableau,
    run_convergence,
    sample_error,
    TableauFormatError,
)
from .orderconds import verify_fcrkn_order, verify_fcrk_quadrature
from .problems import PROBLEM_IDS, get_problem
from .stepper import IntegrationConfig, IntegrationError, integrate
from .tableau import FcrkTableau, MethodId, builtin, validate_structure

USAGE_ERROR = 2
RUN_ERROR = 1

# What `check` certifies for each built-in id: (report attribute, order).
_CLAIMS = {
    MethodId.FCRK3R: ("uniform_u", 3, "uniform quadrature order 3"),
    MethodId.FCRK4R: ("discrete_u", 4, "discrete quadrature order 4"),
    MethodId.FCRKN3R: ("uniform", 3, "uniform order 3"),
    MethodId.FCRKN4R: ("uniform", 4, "uniform order 4"),
}


class CliError(Exception):
    def __init__(self, message, code=USAGE_ERROR):
        super().__init__(message)
        self.code = code


def _resolve_method(spec: str):
    """A built-in id, or a path to a tableau file."""
    try:
        mid = MethodId.parse(spec)
        return builtin(mid), mid
    except KeyError:
        pass
    path = Path(spec)
    if not path.is_file():
        raise CliError(f"unknown method {spec!r} (not a built-in id or a tableau file)")
    try:
        return parse_tableau(path.read_text()), None
    except TableauFormatError as exc:
        raise CliError(f"bad tableau file {spec!r}: {exc}") from exc


def _resolve_problem(spec: str):
    try:
        return get_problem(spec)
    except KeyError:
        raise CliError(
            f"unknown problem {spec!r} (available: {', '.join(PROBLEM_IDS)})"
        ) from None


def _parse_breakpoints(text):
    if not text:
        return ()
    try:
        return tuple(float(tok) for tok in text.split(","))
    except ValueError:
        raise CliError(f"bad --breakpoints value {text!r}") from None


def _check_pairing(tableau, problem):
    want = 1 if isinstance(tableau, FcrkTableau) else 2
    if problem.order != want:
        kinds = {1: "first-order", 2: "second-order"}
        raise CliError(
            f"method kind mismatch: {tableau.kind} methods solve {kinds[want]} problems,"
            f" but {problem.name} is {kinds[problem.order]}"
        )


def _write_output(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_check(args) -> int:
    tableau, mid = _resolve_method(args.method)
    label = mid.value if mid else args.method
    violations = validate_structure(tableau)
    print(f"method: {label} ({tableau.kind}, {tableau.s} stages)")
    if violations:
        print("structural diagnostics (transcription suspects):")
        for v in violations:
            print(f"  - {v}")
    else:
        print("structural diagnostics: none")
    if isinstance(tableau, FcrkTableau):
        report = verify_fcrk_quadrature(tableau)
        print(f"uniform quadrature order: {report.uniform_u} (necessary conditions only)")
        print(f"discrete quadrature order: {report.discrete_u}")
    else:
        report = verify_fcrkn_order(tableau)
        print(f"uniform order: solution {report.uniform_u}, derivative {report.uniform_du}"
              f" -> uniform order {report.uniform}")
        print(f"discrete order: solution {report.discrete_u}, derivative {report.discrete_du}"
              f" -> discrete order {report.discrete}")
    for line in report.failures:
        print(f"first failing condition: {line}")
    if mid is None:
        return 0 if not violations else RUN_ERROR
    attr, want, claim = _CLAIMS[mid]
    certified = getattr(report, attr) >= want
    print(f"claimed: {claim} -> {'CERTIFIED' if certified else 'NOT CERTIFIED'}")
    return 0 if certified else RUN_ERROR


def cmd_solve(args) -> int:
    tableau, _ = _resolve_method(args.method)
    problem = _resolve_problem(args.problem)
    _check_pairing(tableau, problem)
    t_end = args.t_end if args.t_end is not None else problem.default_span[1]
    cfg = IntegrationConfig(
        h=args.h,
        t_end=t_end,
        breakpoints=_parse_breakpoints(args.breakpoints),
        reuse_enabled=not args.no_reuse,
    )
    trace, stats = integrate(problem, tableau, cfg)
    _write_output(emit_solution_csv(trace, args.samples), args.out)
    summary = f"steps={stats.steps} nf={stats.nf} restarts={stats.restarts}"
    if problem.exact is not None:
        err, errp = sample_error(
            trace, problem.exact, args.samples,
            exact_derivative=getattr(problem, "exact_derivative", None),
        )
        summary += f" err={err:.6e}"
        if errp is not None:
            summary += f" errp={errp:.6e}"
    print(summary, file=sys.stdout if args.out else sys.stderr)
    return 0


def cmd_converge(args) -> int:
    tableau, mid = _resolve_method(args.method)
    problem = _resolve_problem(args.problem)
    _check_pairing(tableau, problem)
    if args.levels < 1:
        raise CliError(f"--levels must be >= 1, got {args.levels}")
    h_list = [args.h_start * 2.0**-k for k in range(args.levels)]
    rows = run_convergence(
        problem,
        tableau,
        h_list,
        samples_per_step=args.samples,
        reuse=not args.no_reuse,
        breakpoints=_parse_breakpoints(args.breakpoints),
        method_label=mid.value if mid else "custom",
    )
    _write_output(emit_csv(rows), args.out)
    info = sys.stdout if args.out else sys.stderr
    try:
        est = estimate_order(rows)
    except InsufficientDataError as exc:
        print(f"slope estimate unavailable: {exc}", file=sys.stderr)
        return RUN_ERROR
    print(
        f"slope(err) = {est.slope:.4f} (intercept {est.intercept:.4f},"
        f" {est.points_used} smallest h)",
        file=info,
    )
    if any(r.errp is not None for r in rows):
        estp = estimate_order(rows, field="errp")
        print(
            f"slope(errp) = {estp.slope:.4f} (intercept {estp.intercept:.4f},"
            f" {estp.points_used} smallest h)",
            file=info,
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fcrk",
        description="Explicit functional continuous Runge-Kutta(-Nystrom) methods"
        " with last-stage reuse: order certification, solves, convergence sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("check", help="verify order conditions in exact arithmetic")
    pc.add_argument("--method", required=True, help="built-in id (fcrk3r, fcrk4r, fcrkn3r, fcrkn4r) or tableau file")
    pc.set_defaults(fn=cmd_check)

    def common_run_flags(p):
        p.add_argument("--method", required=True, help="built-in id or tableau file")
        p.add_argument("--problem", required=True, help="problem id (p1..p4)")
        p.add_argument("--samples", type=int, default=16, help="dense samples per step (default 16)")
        p.add_argument("--out", default=None, help="write CSV here instead of stdout")
        p.add_argument("--no-reuse", action="store_true", help="re-evaluate the last stage instead of carrying it")
        p.add_argument("--breakpoints", default="", help="comma-separated mesh-aligned restart times")

    ps = sub.add_parser("solve", help="single constant-step solve with dense output")
    common_run_flags(ps)
    ps.add_argument("--h", type=float, required=True, help="step size")
    ps.add_argument("--t-end", dest="t_end", type=float, default=None, help="override the problem span end")
    ps.set_defaults(fn=cmd_solve)

    pv = sub.add_parser("converge", help="constant-step convergence sweep, h = H * 2^-k")
    common_run_flags(pv)
    pv.add_argument("--h-start", dest="h_start", type=float, required=True, help="largest step size H")
    pv.add_argument("--levels", type=int, required=True, help="number of halvings L (k = 0..L-1)")
    pv.set_defaults(fn=cmd_converge)
    return parser


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_ERROR
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (IntegrationError, InsufficientDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUN_ERROR
    except ValueError as exc:
        # configuration problems (step size, breakpoints, spans) are usage errors
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
