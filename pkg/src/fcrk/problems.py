"""Benchmark problems with known analytic solutions.

Four delay problems with overlapping (two first-order, two second-order
variants of the same right-hand sides) plus polynomial quadrature problem
generators used by the exactness tests. Right-hand sides receive the
current time and an evaluation interface t' -> state vector and must stay
within its domain; the deviating arguments of all built-in problems satisfy
g(t) <= t, so no history before the start time is ever queried.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .history import DomainError, HistorySpec


@dataclass(frozen=True)
class RfdeProblem:
    """First-order problem: du/dt = rhs(t, u_t)."""

    name: str
    history: HistorySpec
    rhs: Callable
    exact: Optional[Callable] = None
    default_span: tuple = (0.0, 1.0)
    order: int = field(default=1, init=False)


@dataclass(frozen=True)
class Rfde2Problem:
    """Second-order problem of the special form d2u/dt2 = rhs(t, u_t)."""

    name: str
    history: HistorySpec
    rhs: Callable
    exact: Optional[Callable] = None
    exact_derivative: Optional[Callable] = None
    default_span: tuple = (0.0, 1.0)
    order: int = field(default=2, init=False)


def _pantograph_like_rhs(t, u):
    """u(t / (1+2t)^2) raised to the power (1+2t)^2.

    The deviating argument t/(1+2t)^2 lies in [0, t] for t >= 0, entering
    the current step only while t is small (the overlapping phase).
    """
    w = (1.0 + 2.0 * t) ** 2
    base = u(t / w)
    if np.any(base <= 0.0):
        raise DomainError(
            f"real power needs a positive base, got {base!r} at t={t!r}"
            " (likely integrator blowup)"
        )
    return base**w


def _vanishing_delay(t: float) -> float:
    # literal form: the square of the sine, not a half-angle rewrite
    return t - math.sin(100.0 * math.pi * t) ** 2 / 100.0


def problem1() -> RfdeProblem:
    """Growing exponential with a state-dependent vanishing-at-zero delay.

    du/dt = u(t/(1+2t)^2)^((1+2t)^2), u(0) = 1; solution e^t on [0, 1].
    """
    history = HistorySpec(t0=0.0, r=0.0, phi=lambda t: np.array([1.0]))
    return RfdeProblem(
        name="p1",
        history=history,
        rhs=_pantograph_like_rhs,
        exact=lambda t: np.array([math.exp(t)]),
        default_span=(0.0, 1.0),
    )


def problem2() -> RfdeProblem:
    """Decaying exponential with a rapidly oscillating vanishing delay.

    du/dt = -u(g(t)) u(t) e^(g(t)) with g(t) = t - sin(100 pi t)^2 / 100 and
    history e^(-t); the solution continues the history, e^(-t) on [0, 1/2].
    The delay vanishes at every t = k/100, giving repeated overlapping.
    """

    def rhs(t, u):
        g = _vanishing_delay(t)
        return -u(g) * u(t) * math.exp(g)

    history = HistorySpec(t0=0.0, r=0.01, phi=lambda t: np.array([math.exp(-t)]))
    return RfdeProblem(
        name="p2",
        history=history,
        rhs=rhs,
        exact=lambda t: np.array([math.exp(-t)]),
        default_span=(0.0, 0.5),
    )


def problem3() -> Rfde2Problem:
    """Second-order variant of problem 1.

    d2u/dt2 = u(t/(1+2t)^2)^((1+2t)^2), u(0) = 1, du/dt(0) = -1;
    solution e^(-t) on [0, 3].
    """
    history = HistorySpec(
        t0=0.0, r=0.0, phi=lambda t: np.array([1.0]), phi_dot0=np.array([-1.0])
    )
    return Rfde2Problem(
        name="p3",
        history=history,
        rhs=_pantograph_like_rhs,
        exact=lambda t: np.array([math.exp(-t)]),
        exact_derivative=lambda t: np.array([-math.exp(-t)]),
        default_span=(0.0, 3.0),
    )


def problem4() -> Rfde2Problem:
    """Second-order variant of problem 2.

    d2u/dt2 = u(g(t)) u(t) e^(g(t)) with history e^(-t); solution e^(-t)
    on [0, 1/2].
    """

    def rhs(t, u):
        g = _vanishing_delay(t)
        return u(g) * u(t) * math.exp(g)

    history = HistorySpec(
        t0=0.0, r=0.01, phi=lambda t: np.array([math.exp(-t)]), phi_dot0=np.array([-1.0])
    )
    return Rfde2Problem(
        name="p4",
        history=history,
        rhs=rhs,
        exact=lambda t: np.array([math.exp(-t)]),
        exact_derivative=lambda t: np.array([-math.exp(-t)]),
        default_span=(0.0, 0.5),
    )


def quadrature_problem(degree: int, order_kind: str = "first"):
    """Monomial quadrature problem: the RHS ignores the solution entirely.

    first:  du/dt = d/dt t^degree,     exact t^degree
    second: d2u/dt2 = d2/dt2 t^degree, exact t^degree
    Exact initial data; used to check polynomial reproduction of the dense
    output (methods of uniform order p reproduce degree <= p exactly).
    """
    if degree < 0:
        raise ValueError(f"degree must be nonnegative, got {degree}")
    d = degree

    def exact(t):
        return np.array([float(t**d)])

    def exact_derivative(t):
        return np.array([d * float(t ** (d - 1)) if d >= 1 else 0.0])

    if order_kind == "first":

        def rhs(t, u):
            return np.array([d * float(t ** (d - 1)) if d >= 1 else 0.0])

        history = HistorySpec(t0=0.0, r=0.0, phi=exact)
        return RfdeProblem(
            name=f"quad{d}",
            history=history,
            rhs=rhs,
            exact=exact,
            default_span=(0.0, 1.0),
        )
    if order_kind == "second":

        def rhs2(t, u):
            return np.array([d * (d - 1) * float(t ** (d - 2)) if d >= 2 else 0.0])

        history = HistorySpec(
            t0=0.0, r=0.0, phi=exact, phi_dot0=exact_derivative(0.0)
        )
        return Rfde2Problem(
            name=f"quad{d}",
            history=history,
            rhs=rhs2,
            exact=exact,
            exact_derivative=exact_derivative,
            default_span=(0.0, 1.0),
        )
    raise ValueError(f"order_kind must be 'first' or 'second', got {order_kind!r}")


_BUILDERS = {
    "p1": problem1,
    "p2": problem2,
    "p3": problem3,
    "p4": problem4,
}

PROBLEM_IDS = tuple(_BUILDERS)


def get_problem(problem_id: str):
    """Problem instance for a CLI id (p1..p4)."""
    try:
        builder = _BUILDERS[problem_id.strip().lower()]
    except KeyError:
        raise KeyError(f"unknown problem id {problem_id!r}") from None
    return builder()
