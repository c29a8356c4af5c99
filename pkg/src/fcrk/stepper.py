"""Constant-step explicit stepping engine with last-stage reuse.

A step computes the stage derivatives K_1..K_s in order, serving the
right-hand side through a stage accessor, and commits one dense segment per
step. When reuse is on, the last stage (at abscissa 1) is adopted unchanged
as the first stage of the next step; at the start time and at user-declared
breakpoints the first stage is freshly evaluated against the committed
trace instead. When reuse is off, the same last-stage evaluation is
re-issued to the right-hand side rather than carried over, so the two modes
produce bit-identical trajectories and differ only in evaluation counts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import history as hist
from .history import Segment, SolutionTrace, StageAccessor
from .tableau import FcrknTableau, FcrkTableau


class IntegrationError(RuntimeError):
    """A step failed: right-hand side error or non-finite stage values."""


@dataclass(frozen=True)
class IntegrationConfig:
    """Constant-step run description.

    (t_end - t0)/h must be an integer to within 1e-8 and breakpoints must
    coincide with mesh points to within 1e-12 * h; both are validated when
    an integration starts.
    """

    h: float
    t_end: float
    breakpoints: tuple = ()
    reuse_enabled: bool = True


@dataclass
class StepStats:
    """Step, evaluation and restart accounting for one integration.

    restarts counts fresh first-stage evaluations against the committed
    trace (the start time plus every declared breakpoint); the bookkeeping
    re-evaluations done in no-reuse mode are not restarts. overlap_per_step
    records, per step, how many accessor queries hit the in-step branch
    while the step was built.
    """

    steps: int = 0
    nf: int = 0
    restarts: int = 0
    overlap_per_step: list = field(default_factory=list)


class CompiledTableau:
    """Float copy of a tableau, derived once per integration run.

    rows[i] holds the weight-coefficient tuples feeding stage i+1 (entries
    beyond the strict lower part are never read); for a second-order tableau
    the last row aliases the b row, which makes the reused stage evaluate
    through bit-identical arithmetic with the committed segment.
    """

    __slots__ = ("kind", "s", "c", "rows", "b", "bp", "exact")

    def __init__(self, tableau):
        self.exact = tableau
        self.kind = tableau.kind
        self.s = tableau.s
        self.c = tuple(float(ci) for ci in tableau.c)
        if isinstance(tableau, FcrkTableau):
            self.rows = tuple(
                tuple(poly.float_coeffs() for poly in row) for row in tableau.A
            )
            self.b = tuple(poly.float_coeffs() for poly in tableau.b)
            self.bp = None
        else:
            self.b = tuple(poly.float_coeffs() for poly in tableau.b) + ((),)
            self.bp = tuple(poly.float_coeffs() for poly in tableau.bp)
            inner = tuple(
                tuple(poly.float_coeffs() for poly in row) for row in tableau.A
            )
            self.rows = ((),) + inner + (self.b,)


def compile_tableau(tableau) -> CompiledTableau:
    if isinstance(tableau, CompiledTableau):
        return tableau
    if not isinstance(tableau, (FcrkTableau, FcrknTableau)):
        raise TypeError(f"not a tableau: {type(tableau).__name__}")
    return CompiledTableau(tableau)


def _call_rhs(rhs, t_i, accessor, shape, stage, sigma):
    try:
        val = np.atleast_1d(np.asarray(rhs(t_i, accessor), dtype=float))
    except IntegrationError:
        raise
    except Exception as exc:
        raise IntegrationError(
            f"right-hand side failed at stage {stage} (t={t_i!r}, step starting at {sigma!r}): {exc}"
        ) from exc
    if val.shape != shape:
        raise IntegrationError(
            f"right-hand side returned shape {val.shape} at stage {stage}, expected {shape}"
        )
    if not np.all(np.isfinite(val)):
        raise IntegrationError(
            f"non-finite stage derivative at stage {stage} (t={t_i!r}, step starting at {sigma!r})"
        )
    return val


def _stage_accessor(ct, trace, sigma, h, i, K, y0, ydot0):
    t_i = sigma + ct.c[i] * h
    acc = StageAccessor(
        trace,
        sigma,
        h,
        cap=t_i,
        row=ct.rows[i],
        K=K,
        nstages=i,
        kind=ct.kind,
        y0=y0,
        ydot0=ydot0,
    )
    return t_i, acc


def fcrk_step(tableau, rhs, trace: SolutionTrace, sigma: float, h: float, k1=None):
    """One explicit first-order step; commits a segment, returns (segment, K_s).

    If k1 is given it is adopted as the first stage without recomputation
    (it must be the previous step's last stage with abscissa 1). The
    returned last stage is suitable for passing unmodified as the next
    step's k1.
    """
    ct = compile_tableau(tableau)
    if ct.kind != hist.FCRK:
        raise TypeError("fcrk_step needs a first-order tableau")
    y0 = trace.eval(sigma)
    K = np.empty((ct.s, y0.shape[0]))
    overlaps = 0
    start = 0
    if k1 is not None:
        K[0] = k1
        start = 1
    for i in range(start, ct.s):
        t_i, acc = _stage_accessor(ct, trace, sigma, h, i, K, y0, None)
        K[i] = _call_rhs(rhs, t_i, acc, y0.shape, i + 1, sigma)
        overlaps += acc.overlap_evals
    seg = Segment(sigma, h, y0, K, ct.b, hist.FCRK, overlap_evals=overlaps)
    trace.append(seg)
    return seg, K[ct.s - 1]


def fcrkn_step(tableau, rhs, trace: SolutionTrace, sigma: float, h: float, k1=None):
    """One explicit second-order step; commits a segment, returns (segment, K_s)."""
    ct = compile_tableau(tableau)
    if ct.kind != hist.FCRKN:
        raise TypeError("fcrkn_step needs a second-order tableau")
    y0 = trace.eval(sigma)
    ydot0 = trace.eval_derivative(sigma)
    K = np.empty((ct.s, y0.shape[0]))
    overlaps = 0
    start = 0
    if k1 is not None:
        K[0] = k1
        start = 1
    for i in range(start, ct.s):
        t_i, acc = _stage_accessor(ct, trace, sigma, h, i, K, y0, ydot0)
        K[i] = _call_rhs(rhs, t_i, acc, y0.shape, i + 1, sigma)
        overlaps += acc.overlap_evals
    seg = Segment(
        sigma, h, y0, K, ct.b, hist.FCRKN, ydot0=ydot0, dweights=ct.bp, overlap_evals=overlaps
    )
    trace.append(seg)
    return seg, K[ct.s - 1]


def _reevaluate_last_stage(ct, rhs, trace, prev_sigma, h):
    """Re-issue the previous step's last-stage evaluation (no-reuse mode).

    The accessor is rebuilt from the committed segment, so the call is
    argument-identical to the original one and, the right-hand side being
    deterministic, returns the same value bitwise.
    """
    seg = trace.segments[-1]
    i = ct.s - 1
    t_i, acc = _stage_accessor(ct, trace, prev_sigma, h, i, seg.K, seg.y0, seg.ydot0)
    return _call_rhs(rhs, t_i, acc, seg.y0.shape, i + 1, prev_sigma)


def _plan_mesh(t0: float, cfg: IntegrationConfig):
    if cfg.h <= 0:
        raise ValueError(f"step size must be positive, got {cfg.h}")
    if cfg.t_end <= t0:
        raise ValueError(f"t_end={cfg.t_end} must lie beyond t0={t0}")
    ratio = (cfg.t_end - t0) / cfg.h
    n_steps = round(ratio)
    if n_steps < 1 or abs(ratio - n_steps) > 1e-8:
        raise ValueError(
            f"(t_end - t0)/h = {ratio!r} is not an integer to within 1e-8;"
            " constant-step runs must land exactly on t_end"
        )
    bp_idx = set()
    for bp in cfg.breakpoints:
        if not t0 < bp < cfg.t_end:
            raise ValueError(f"breakpoint {bp!r} outside the open span ({t0!r}, {cfg.t_end!r})")
        k = round((bp - t0) / cfg.h)
        if not 1 <= k <= n_steps - 1 or abs(bp - (t0 + k * cfg.h)) > 1e-12 * cfg.h:
            raise ValueError(f"breakpoint {bp!r} does not coincide with a mesh point")
        bp_idx.add(k)
    return n_steps, bp_idx


def _integrate(problem, tableau, cfg: IntegrationConfig, step_fn):
    ct = compile_tableau(tableau)
    t0 = problem.history.t0
    n_steps, bp_idx = _plan_mesh(t0, cfg)
    trace = SolutionTrace(problem.history)
    stats = StepStats()
    carried = None
    sigma = t0
    prev_sigma = t0
    for n in range(n_steps):
        fresh = n == 0 or n in bp_idx
        k1 = None
        extra_nf = 0
        try:
            if not fresh:
                if cfg.reuse_enabled:
                    k1 = carried
                else:
                    k1 = _reevaluate_last_stage(ct, problem.rhs, trace, prev_sigma, cfg.h)
                    extra_nf = 1
            seg, carried = step_fn(ct, problem.rhs, trace, sigma, cfg.h, k1)
        except IntegrationError as exc:
            raise IntegrationError(f"step {n + 1} of {n_steps}: {exc}") from exc
        stats.steps += 1
        stats.nf += (ct.s if k1 is None else ct.s - 1) + extra_nf
        if fresh:
            stats.restarts += 1
        stats.overlap_per_step.append(seg.overlap_evals)
        prev_sigma = sigma
        sigma = seg.t_end
    return trace, stats


def integrate_fcrk(problem, tableau, cfg: IntegrationConfig):
    """March a first-order problem from t0 to t_end in constant steps."""
    if getattr(problem, "order", 1) != 1:
        raise TypeError("integrate_fcrk expects a first-order problem")
    return _integrate(problem, tableau, cfg, fcrk_step)


def integrate_fcrkn(problem, tableau, cfg: IntegrationConfig):
    """March a second-order problem from t0 to t_end in constant steps."""
    if getattr(problem, "order", 1) != 2:
        raise TypeError("integrate_fcrkn expects a second-order problem")
    if problem.history.phi_dot0 is None:
        raise ValueError("second-order integration needs phi_dot0 in the history spec")
    return _integrate(problem, tableau, cfg, fcrkn_step)


def integrate(problem, tableau, cfg: IntegrationConfig):
    """Dispatch on tableau kind."""
    ct = compile_tableau(tableau)
    if ct.kind == hist.FCRK:
        return integrate_fcrk(problem, ct, cfg)
    return integrate_fcrkn(problem, ct, cfg)
