"""Benchmark harness: dense-error measurement, convergence sweeps, CSV and
the exact-rational tableau text format.

The error metric is the max-norm dense error sampled on an equispaced local
grid per step (the continuous maximum is not computable; 16 interior samples
resolve the extrema of the degree <= 4 interpolants well enough for order
measurement). Slope estimation uses only the smallest half of the step
sizes, the asymptotic regime.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import history as hist
from .ratpoly import RationalPoly
from .stepper import IntegrationConfig, IntegrationError, integrate
from .tableau import FcrknTableau, FcrkTableau, MethodId, builtin


class InsufficientDataError(ValueError):
    """Not enough usable rows to fit a convergence slope."""


class TableauFormatError(ValueError):
    """Malformed tableau text."""


@dataclass(frozen=True)
class ConvergenceRow:
    """One (method, problem, h) experiment record."""

    method: str
    problem: str
    h: float
    steps: int
    nf: int
    err: float
    errp: Optional[float] = None


@dataclass(frozen=True)
class SlopeEstimate:
    slope: float
    intercept: float
    points_used: int


def sample_error(trace, exact, samples_per_step: int = 16, exact_derivative=None):
    """Max dense error over all steps, sampled at equispaced local points.

    Returns (err, errp); errp is measured only when the trace carries a
    derivative output and exact_derivative is given, else None. Norms are
    max-norm over components.
    """
    if samples_per_step < 1:
        raise ValueError(f"samples_per_step must be >= 1, got {samples_per_step}")
    alphas = [k / samples_per_step for k in range(samples_per_step + 1)]
    want_deriv = trace.kind == hist.FCRKN and exact_derivative is not None
    err = 0.0
    errp = 0.0 if want_deriv else None
    for seg in trace.segments:
        for a in alphas:
            t = seg.sigma + a * seg.h
            diff = seg.value(a) - np.atleast_1d(np.asarray(exact(t), dtype=float))
            err = max(err, float(np.max(np.abs(diff))))
            if want_deriv:
                diffp = seg.derivative(a) - np.atleast_1d(
                    np.asarray(exact_derivative(t), dtype=float)
                )
                errp = max(errp, float(np.max(np.abs(diffp))))
    return err, errp


def _resolve_method(method):
    if isinstance(method, (MethodId, str)):
        mid = MethodId.parse(method) if isinstance(method, str) else method
        return builtin(mid), mid.value
    if isinstance(method, (FcrkTableau, FcrknTableau)):
        return method, "custom"
    raise TypeError(f"not a method id or tableau: {type(method).__name__}")


def run_convergence(
    problem,
    method,
    h_list,
    samples_per_step: int = 16,
    reuse: bool = True,
    breakpoints=(),
    method_label: Optional[str] = None,
):
    """One ConvergenceRow per step size, in the given order.

    A failed integration is recorded with err = nan (and nf = 0) so it can
    be reported but excluded from slope fits.
    """
    tableau, label = _resolve_method(method)
    label = method_label or label
    if problem.exact is None:
        raise ValueError(f"problem {problem.name} has no exact solution to measure against")
    t0, t_end = problem.default_span
    rows = []
    for h in h_list:
        cfg = IntegrationConfig(
            h=float(h), t_end=t_end, breakpoints=tuple(breakpoints), reuse_enabled=reuse
        )
        try:
            trace, stats = integrate(problem, tableau, cfg)
        except IntegrationError:
            rows.append(
                ConvergenceRow(
                    method=label,
                    problem=problem.name,
                    h=float(h),
                    steps=round((t_end - t0) / h),
                    nf=0,
                    err=math.nan,
                    errp=None,
                )
            )
            continue
        err, errp = sample_error(
            trace,
            problem.exact,
            samples_per_step,
            exact_derivative=getattr(problem, "exact_derivative", None),
        )
        rows.append(
            ConvergenceRow(
                method=label,
                problem=problem.name,
                h=float(h),
                steps=stats.steps,
                nf=stats.nf,
                err=err,
                errp=errp,
            )
        )
    return rows


def estimate_order(rows, field: str = "err") -> SlopeEstimate:
    """Least-squares slope of log(err) vs log(h) on the smallest step sizes.

    Only rows with finite positive error enter; of those, the smallest half
    of the h values (rounded up, at least two) are fitted.
    """
    usable = []
    for row in rows:
        val = getattr(row, field)
        if val is not None and math.isfinite(val) and val > 0.0:
            usable.append((row.h, val))
    if len(usable) < 2:
        raise InsufficientDataError(
            f"slope fit needs at least 2 rows with finite positive {field}, got {len(usable)}"
        )
    usable.sort(key=lambda p: p[0])
    n_used = max(2, (len(usable) + 1) // 2)
    pts = usable[:n_used]
    logh = np.log([p[0] for p in pts])
    loge = np.log([p[1] for p in pts])
    slope, intercept = np.polyfit(logh, loge, 1)
    return SlopeEstimate(slope=float(slope), intercept=float(intercept), points_used=n_used)


# ---------------------------------------------------------------------------
# CSV


def _fmt(x: float) -> str:
    return f"{x:.17g}"


CSV_HEADER = "method,problem,h,steps,nf,err,errp"


def emit_csv(rows) -> str:
    """Deterministic CSV with 17-significant-digit reals (round-trip safe)."""
    lines = [CSV_HEADER]
    for r in rows:
        errp = "" if r.errp is None else _fmt(r.errp)
        lines.append(f"{r.method},{r.problem},{_fmt(r.h)},{r.steps},{r.nf},{_fmt(r.err)},{errp}")
    return "\n".join(lines) + "\n"


def parse_csv(text: str):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"expected header {CSV_HEADER!r}")
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 7:
            raise ValueError(f"malformed row: {ln!r}")
        rows.append(
            ConvergenceRow(
                method=parts[0],
                problem=parts[1],
                h=float(parts[2]),
                steps=int(parts[3]),
                nf=int(parts[4]),
                err=float(parts[5]),
                errp=float(parts[6]) if parts[6] else None,
            )
        )
    return rows


def emit_solution_csv(trace, samples_per_step: int = 16) -> str:
    """Dense samples of a trace: t, solution components, derivative components."""
    if samples_per_step < 1:
        raise ValueError(f"samples_per_step must be >= 1, got {samples_per_step}")
    with_deriv = trace.kind == hist.FCRKN
    dim = trace.segments[0].y0.shape[0] if trace.segments else 1
    cols = ["t"] + [f"u{i}" for i in range(dim)]
    if with_deriv:
        cols += [f"du{i}" for i in range(dim)]
    lines = [",".join(cols)]
    for k, seg in enumerate(trace.segments):
        # interior samples plus each segment's start; the final endpoint
        # closes the last segment
        alphas = [j / samples_per_step for j in range(samples_per_step)]
        if k == len(trace.segments) - 1:
            alphas.append(1.0)
        for a in alphas:
            t = seg.sigma + a * seg.h
            vals = [_fmt(t)] + [_fmt(v) for v in seg.value(a)]
            if with_deriv:
                vals += [_fmt(v) for v in seg.derivative(a)]
            lines.append(",".join(vals))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Tableau text format
#
# line 1: "fcrk <s>" or "fcrkn <s>"
# line 2: the abscissae as rationals, space-separated
# then one line per stage row (stages 2..s for fcrk, 2..s-1 for fcrkn) with
# one bracketed entry per nonzero-allowed column: comma-separated rational
# coefficients, ascending powers; "[]" is the zero polynomial.
# The weight rows come last, prefixed "b:" and (fcrkn only) "bp:".

_ENTRY_RE = re.compile(r"\[([^\[\]]*)\]")


def _poly_text(p: RationalPoly) -> str:
    return "[" + ",".join(str(c) for c in p.coeffs) + "]"


def _parse_entries(body: str, lineno: int):
    stripped = _ENTRY_RE.sub("", body).strip()
    if stripped:
        raise TableauFormatError(f"line {lineno}: stray tokens {stripped!r} outside entries")
    out = []
    for m in _ENTRY_RE.finditer(body):
        inner = m.group(1).strip()
        try:
            coeffs = [Fraction(tok.strip()) for tok in inner.split(",")] if inner else []
        except (ValueError, ZeroDivisionError) as exc:
            raise TableauFormatError(f"line {lineno}: bad rational in {m.group(0)!r}: {exc}") from None
        out.append(RationalPoly(coeffs))
    return out


def serialize_tableau(t) -> str:
    """Exact text form; parsing it back reproduces the tableau exactly."""
    lines = [f"{t.kind} {t.s}", " ".join(str(ci) for ci in t.c)]
    if isinstance(t, FcrkTableau):
        for i in range(1, t.s):
            lines.append(" ".join(_poly_text(t.A[i][j]) for j in range(i)))
        lines.append("b: " + " ".join(_poly_text(p) for p in t.b))
    else:
        for i, row in enumerate(t.A):
            lines.append(" ".join(_poly_text(row[j]) for j in range(i + 1)))
        lines.append("b: " + " ".join(_poly_text(p) for p in t.b))
        lines.append("bp: " + " ".join(_poly_text(p) for p in t.bp))
    return "\n".join(lines) + "\n"


def parse_tableau(text: str):
    """Parse the text format back into an exact tableau."""
    raw = [
        (i + 1, ln.strip())
        for i, ln in enumerate(text.splitlines())
        if ln.strip() and not ln.lstrip().startswith("#")
    ]
    if len(raw) < 2:
        raise TableauFormatError("tableau text needs a kind line and an abscissa line")
    lineno, head = raw[0]
    parts = head.split()
    if len(parts) != 2 or parts[0] not in ("fcrk", "fcrkn"):
        raise TableauFormatError(f"line {lineno}: expected 'fcrk <s>' or 'fcrkn <s>', got {head!r}")
    kind = parts[0]
    try:
        s = int(parts[1])
    except ValueError:
        raise TableauFormatError(f"line {lineno}: bad stage count {parts[1]!r}") from None
    if s < 2:
        raise TableauFormatError(f"line {lineno}: stage count must be >= 2, got {s}")
    lineno, cline = raw[1]
    try:
        c = tuple(Fraction(tok) for tok in cline.split())
    except (ValueError, ZeroDivisionError) as exc:
        raise TableauFormatError(f"line {lineno}: bad abscissa: {exc}") from None
    if len(c) != s:
        raise TableauFormatError(f"line {lineno}: expected {s} abscissae, got {len(c)}")

    body = raw[2:]
    n_a_rows = s - 1 if kind == "fcrk" else s - 2
    expected = n_a_rows + (1 if kind == "fcrk" else 2)
    if len(body) != expected:
        raise TableauFormatError(
            f"expected {expected} tableau rows after the abscissae, got {len(body)}"
        )

    zero = RationalPoly.zero()

    def padded(entries, stage_width):
        return tuple(entries) + (zero,) * (s - stage_width)

    a_rows = []
    for k in range(n_a_rows):
        lineno, line = body[k]
        stage = k + 2
        entries = _parse_entries(line, lineno)
        if len(entries) != stage - 1:
            raise TableauFormatError(
                f"line {lineno}: stage {stage} row needs {stage - 1} entries, got {len(entries)}"
            )
        a_rows.append(padded(entries, stage - 1))

    def weight_line(idx, prefix, count):
        lineno, line = body[idx]
        if not line.startswith(prefix):
            raise TableauFormatError(f"line {lineno}: expected a {prefix!r} row")
        entries = _parse_entries(line[len(prefix):], lineno)
        if len(entries) != count:
            raise TableauFormatError(
                f"line {lineno}: {prefix!r} row needs {count} entries, got {len(entries)}"
            )
        return tuple(entries)

    if kind == "fcrk":
        b = weight_line(n_a_rows, "b:", s)
        A = (padded((), 0),) + tuple(a_rows)
        return FcrkTableau(s=s, c=c, A=A, b=b)
    b = weight_line(n_a_rows, "b:", s - 1)
    bp = weight_line(n_a_rows + 1, "bp:", s)
    return FcrknTableau(s=s, c=c, A=tuple(a_rows), b=b, bp=bp)
