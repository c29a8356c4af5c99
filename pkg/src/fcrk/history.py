"""Dense, evaluable representation of the numerical solution.

A solution trace is the user's initial history function extended step by
step with committed dense-output segments; during a step, a stage accessor
serves the right-hand side with values from the committed trace for past
times and from the in-progress stage polynomial up to a hard domain cap.

Value evaluation for committed segments and for in-step stage polynomials
goes through the same kernels so that identical weight rows produce
bit-identical floating point results; dense continuity across mesh points
and last-stage reuse both rest on that.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

FCRK = "fcrk"
FCRKN = "fcrkn"


class DomainError(ValueError):
    """Evaluation requested outside the admissible time domain."""


class OverlapDomainError(DomainError):
    """An in-step query reached beyond the current stage's domain cap.

    The right-hand side asked for the solution beyond sigma + c_i h: either
    a bug in the user RHS or a genuinely advanced argument, which explicit
    methods cannot serve.
    """


def _horner(coeffs, x: float) -> float:
    r = 0.0
    for c in reversed(coeffs):
        r = r * x + c
    return r


def stage_combination(weights, alpha: float, K, n: int):
    """sum_{j < n} w_j(alpha) * K[j], accumulated in fixed ascending order.

    The fixed order keeps results bitwise reproducible, which the reuse and
    continuity guarantees rely on.
    """
    acc = np.zeros(K.shape[1])
    for j in range(n):
        w = _horner(weights[j], alpha)
        if w != 0.0:
            acc += w * K[j]
    return acc


def fcrk_value(y0, h: float, alpha: float, weights, K, n: int):
    return y0 + h * stage_combination(weights, alpha, K, n)


def fcrkn_value(y0, ydot0, h: float, alpha: float, weights, K, n: int):
    return y0 + (alpha * h) * ydot0 + (h * h) * stage_combination(weights, alpha, K, n)


def fcrkn_derivative(ydot0, h: float, alpha: float, weights, K, n: int):
    return ydot0 + h * stage_combination(weights, alpha, K, n)


@dataclass
class HistorySpec:
    """Initial data: start time, delay horizon and history function.

    phi maps any t in [t0 - r, t0] to the state vector; r may be math.inf,
    in which case the history domain is unbounded below. phi_dot0 is the
    state derivative at t0, required by second-order methods only.
    """

    t0: float
    r: float
    phi: Callable[[float], "np.ndarray"]
    phi_dot0: Optional["np.ndarray"] = None

    def __post_init__(self):
        if self.r < 0:
            raise ValueError(f"delay horizon must be nonnegative, got {self.r}")
        if self.phi_dot0 is not None:
            self.phi_dot0 = np.atleast_1d(np.asarray(self.phi_dot0, dtype=float))

    @property
    def earliest(self) -> float:
        return -math.inf if math.isinf(self.r) else self.t0 - self.r

    def eval(self, t: float):
        if t < self.earliest:
            raise DomainError(
                f"history queried at t={t!r}, below its domain [{self.earliest!r}, {self.t0!r}]"
            )
        return np.atleast_1d(np.asarray(self.phi(t), dtype=float))


class Segment:
    """One committed step: stage derivative vectors plus weight-row references.

    Evaluation reconstructs the dense output from the scheme's definition:
        fcrk   value(alpha) = y0 + h sum b_j(alpha) K_j
        fcrkn  value(alpha) = y0 + alpha h ydot0 + h^2 sum b_j(alpha) K_j
               derivative(alpha) = ydot0 + h sum bp_j(alpha) K_j
    weights/dweights are tuples of float coefficient tuples shared with the
    compiled tableau, not per-segment copies.
    """

    __slots__ = ("sigma", "h", "y0", "ydot0", "K", "weights", "dweights", "kind", "overlap_evals")

    def __init__(self, sigma, h, y0, K, weights, kind, ydot0=None, dweights=None, overlap_evals=0):
        self.sigma = float(sigma)
        self.h = float(h)
        self.y0 = y0
        self.ydot0 = ydot0
        self.K = K
        self.weights = weights
        self.dweights = dweights
        self.kind = kind
        self.overlap_evals = overlap_evals
        if kind not in (FCRK, FCRKN):
            raise ValueError(f"unknown segment kind {kind!r}")
        if kind == FCRKN and (ydot0 is None or dweights is None):
            raise ValueError("second-order segments need ydot0 and derivative weights")

    @property
    def t_end(self) -> float:
        return self.sigma + self.h

    def value(self, alpha: float):
        n = self.K.shape[0]
        if self.kind == FCRK:
            return fcrk_value(self.y0, self.h, alpha, self.weights, self.K, n)
        return fcrkn_value(self.y0, self.ydot0, self.h, alpha, self.weights, self.K, n)

    def derivative(self, alpha: float):
        if self.kind != FCRKN:
            raise DomainError("derivative output exists only for second-order segments")
        return fcrkn_derivative(self.ydot0, self.h, alpha, self.dweights, self.K, self.K.shape[0])


class SolutionTrace:
    """History function plus contiguous committed segments.

    Single-writer: only the integrator appends. A completed trace is
    immutable in practice and safe to share between readers. Mesh points
    resolve to the right segment's starting value, so one-sided limits at
    breakpoints stay well defined; the trace endpoint itself evaluates the
    last segment at alpha = 1.
    """

    def __init__(self, spec: HistorySpec):
        self.spec = spec
        self.segments: list = []
        self._starts: list = []

    @property
    def t0(self) -> float:
        return self.spec.t0

    @property
    def t_last(self) -> float:
        return self.segments[-1].t_end if self.segments else self.spec.t0

    @property
    def kind(self) -> str:
        return self.segments[0].kind if self.segments else "empty"

    def append(self, segment: Segment):
        # Contiguity is a construction invariant of the stepper; checked in
        # debug runs only.
        assert not self.segments or segment.sigma == self.segments[-1].t_end, (
            "segments must abut exactly"
        )
        self.segments.append(segment)
        self._starts.append(segment.sigma)

    def _locate(self, t: float) -> Segment:
        idx = bisect_right(self._starts, t) - 1
        if idx >= len(self.segments):
            idx = len(self.segments) - 1
        return self.segments[idx]

    def eval(self, t: float):
        """Dense solution value at t in [t0 - r, t_last]."""
        if t <= self.spec.t0:
            return self.spec.eval(t)
        if not self.segments or t > self.t_last:
            raise DomainError(
                f"trace queried at t={t!r}, outside [{self.spec.earliest!r}, {self.t_last!r}]"
            )
        if t == self.t_last:
            # alpha = 1 exactly: (t_end - sigma)/h can be off by an ulp, and
            # the next step's starting value must be this evaluation bitwise.
            return self.segments[-1].value(1.0)
        seg = self._locate(t)
        return seg.value((t - seg.sigma) / seg.h)

    def eval_derivative(self, t: float):
        """Dense derivative value at t in [t0, t_last] (second-order traces)."""
        if self.segments and self.kind != FCRKN:
            raise DomainError("derivative output exists only for second-order traces")
        if t < self.spec.t0:
            raise DomainError(
                f"derivative trace queried at t={t!r}, below the start {self.spec.t0!r}"
            )
        if t == self.spec.t0 and not self.segments:
            if self.spec.phi_dot0 is None:
                raise DomainError("history provides no derivative at the start time")
            return self.spec.phi_dot0
        if not self.segments or t > self.t_last:
            raise DomainError(
                f"derivative trace queried at t={t!r}, outside [{self.spec.t0!r}, {self.t_last!r}]"
            )
        if t == self.t_last:
            return self.segments[-1].derivative(1.0)
        seg = self._locate(t)
        return seg.derivative((t - seg.sigma) / seg.h)


class StageAccessor:
    """Read view of the solution while one stage is being computed.

    Callable: serves t <= sigma from the committed trace and history, and
    sigma < t <= cap from the in-progress stage polynomial built on the
    stages computed so far. cap = sigma + c_i h is a hard bound; queries
    beyond it raise OverlapDomainError. In-step queries are counted in
    overlap_evals (that branch is what realizes overlapping).
    """

    __slots__ = ("trace", "sigma", "h", "cap", "row", "K", "nstages", "kind", "y0", "ydot0", "overlap_evals")

    def __init__(self, trace, sigma, h, cap, row, K, nstages, kind, y0, ydot0=None):
        self.trace = trace
        self.sigma = sigma
        self.h = h
        self.cap = cap
        self.row = row
        self.K = K
        self.nstages = nstages
        self.kind = kind
        self.y0 = y0
        self.ydot0 = ydot0
        self.overlap_evals = 0

    def __call__(self, t: float):
        if t > self.cap:
            raise OverlapDomainError(
                f"stage accessor queried at t={t!r}, beyond its domain cap {self.cap!r}"
                f" (stage reach sigma + c_i h for the step starting at {self.sigma!r})"
            )
        if t <= self.sigma:
            return self.trace.eval(t)
        self.overlap_evals += 1
        alpha = (t - self.sigma) / self.h
        if self.kind == FCRK:
            return fcrk_value(self.y0, self.h, alpha, self.row, self.K, self.nstages)
        return fcrkn_value(self.y0, self.ydot0, self.h, alpha, self.row, self.K, self.nstages)
