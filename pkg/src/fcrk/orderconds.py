"""Exact verification of uniform and discrete order conditions.

For second-order (Nystrom-type) tableaux the full condition set through
order five is checked: the defect polynomials Gamma_k / Gamma'_k / Gamma_ik
must vanish identically (uniform) or at alpha = 1 (discrete), and from order
four on, bivariate coupling defects tie the weight rows to the stage rows of
every group of stages sharing an abscissa.

For first-order tableaux only the quadrature-type conditions are checked;
the report is flagged as a necessary-condition certificate.

No floating point appears anywhere in this module. A condition restricted
to a nondegenerate interval is checked as a global polynomial identity (a
polynomial vanishing on an interval vanishes identically); conditions whose
interval degenerates to a point (abscissa 0) hold vacuously because every
row and weight vanishes at 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .ratpoly import RationalPoly, RationalPoly2
from .tableau import FcrknTableau, FcrkTableau

MAX_ORDER = 5


class UnsupportedOrderError(ValueError):
    """Raised when conditions beyond the supported order are requested."""


@dataclass(frozen=True)
class DefectPoly:
    """One univariate defect polynomial.

    kind is one of "Gamma_k" (solution weights), "GammaPrime_k" (derivative
    weights), "GammaStage_ik" (stage rows, with 1-based stage index) and
    "QuadratureQ_k". The defect vanishing encodes the corresponding order
    condition.
    """

    kind: str
    k: int
    poly: RationalPoly
    stage: int = 0  # 1-based; 0 for non-stage defects

    def label(self) -> str:
        if self.kind == "GammaStage_ik":
            return f"Gamma_{self.stage},{self.k}"
        if self.kind == "GammaPrime_k":
            return f"Gamma'_{self.k}"
        if self.kind == "QuadratureQ_k":
            return f"Q_{self.k}"
        return f"Gamma_{self.k}"


@dataclass(frozen=True)
class CouplingDefect:
    """Bivariate coupling defect for one distinct-abscissa group.

    poly2 expands sum over the group's stages of
    w_i(alpha) * (sum_j a_ij(beta) c_j^e - beta^(e+2)/d); the beta support
    is [0, cstar]. A group at abscissa 0 satisfies its condition vacuously.
    """

    order: int
    group: int  # index into the sorted distinct abscissae
    cstar: Fraction
    weight_row: str  # "b" or "bp"
    stages: tuple  # 1-based stage indices in the group
    poly2: RationalPoly2
    inner_exponent: int = 1
    inner_denominator: int = 6

    def satisfied(self) -> bool:
        return self.cstar == 0 or self.poly2.is_zero()

    def label(self) -> str:
        return f"coupling[{self.weight_row}, order {self.order}, c*={self.cstar}]"


@dataclass
class OrderReport:
    """Highest certified uniform/discrete orders and the blocking conditions.

    The du fields are None for first-order tableaux. failures holds, per
    exhausted track, the identifier of the first condition that fails at the
    next order.
    """

    uniform_u: int
    discrete_u: int
    uniform_du: "int | None" = None
    discrete_du: "int | None" = None
    failures: list = field(default_factory=list)
    quadrature_only: bool = False

    @property
    def uniform(self) -> int:
        """Method uniform order: both tracks must reach it."""
        if self.uniform_du is None:
            return self.uniform_u
        return min(self.uniform_u, self.uniform_du)

    @property
    def discrete(self) -> int:
        if self.discrete_du is None:
            return self.discrete_u
        return min(self.discrete_u, self.discrete_du)


def distinct_abscissae(c) -> list:
    """Group stage indices (0-based) by abscissa value, sorted ascending."""
    groups: dict = {}
    for i, ci in enumerate(c):
        groups.setdefault(Fraction(ci), []).append(i)
    return [(value, tuple(groups[value])) for value in sorted(groups)]


def _weighted_sum(weights, c, exponent: int) -> RationalPoly:
    out = RationalPoly.zero()
    for w, ci in zip(weights, c):
        if not w.is_zero():
            out = out + w * (Fraction(ci) ** exponent)
    return out


def gamma_poly(t: FcrknTableau, k: int) -> RationalPoly:
    """Gamma_k = (1/(k-2)!) (sum b_i c_i^(k-2) - alpha^k / (k(k-1)))."""
    lhs = _weighted_sum(t.b_full(), t.c, k - 2)
    defect = lhs - RationalPoly.monomial(k, Fraction(1, k * (k - 1)))
    return defect * Fraction(1, factorial(k - 2))


def gamma_prime_poly(t: FcrknTableau, k: int) -> RationalPoly:
    """Gamma'_k = (1/(k-1)!) (sum bp_i c_i^(k-1) - alpha^k / k)."""
    lhs = _weighted_sum(t.bp, t.c, k - 1)
    defect = lhs - RationalPoly.monomial(k, Fraction(1, k))
    return defect * Fraction(1, factorial(k - 1))


def gamma_stage_poly(t: FcrknTableau, stage: int, k: int) -> RationalPoly:
    """Gamma_ik for the 1-based stage, with row s being the b row."""
    row = t.stage_rows()[stage - 1]
    lhs = _weighted_sum(row, t.c, k - 2)
    defect = lhs - RationalPoly.monomial(k, Fraction(1, k * (k - 1)))
    return defect * Fraction(1, factorial(k - 2))


def gamma_defects(t: FcrknTableau, p: int) -> list:
    """All Gamma_k (k=2..p), Gamma'_k (k=1..p) and Gamma_ik (k=2..p) defects."""
    if p > MAX_ORDER:
        raise UnsupportedOrderError(f"order conditions available up to {MAX_ORDER}, requested {p}")
    out = []
    for k in range(2, p + 1):
        out.append(DefectPoly("Gamma_k", k, gamma_poly(t, k)))
    for k in range(1, p + 1):
        out.append(DefectPoly("GammaPrime_k", k, gamma_prime_poly(t, k)))
    for k in range(2, p + 1):
        for stage in range(1, t.s + 1):
            out.append(DefectPoly("GammaStage_ik", k, gamma_stage_poly(t, stage, k), stage=stage))
    return out


# Coupling condition families: (target order, weight row, inner exponent e,
# inner denominator d) with inner polynomial sum_j a_ij(beta) c_j^e - beta^(e+2)/d.
_COUPLING_FAMILIES = {
    4: (("bp", 1, 6),),
    5: (("bp", 2, 12), ("b", 1, 6)),
}


def _inner_poly(t: FcrknTableau, stage_row, c, e: int, d: int) -> RationalPoly:
    lhs = _weighted_sum(stage_row, c, e)
    return lhs - RationalPoly.monomial(e + 2, Fraction(1, d))


def coupling_defects(t: FcrknTableau, order: int) -> list:
    """The bivariate coupling defects entering the given order (4 or 5)."""
    if order not in _COUPLING_FAMILIES:
        raise UnsupportedOrderError(f"coupling conditions exist for orders 4 and 5, requested {order}")
    rows = t.stage_rows()
    weights = {"b": t.b_full(), "bp": t.bp}
    out = []
    for weight_row, e, d in _COUPLING_FAMILIES[order]:
        for m, (cstar, stages) in enumerate(distinct_abscissae(t.c)):
            poly2 = RationalPoly2()
            for i in stages:
                w = weights[weight_row][i]
                if w.is_zero():
                    continue
                inner = _inner_poly(t, rows[i], t.c, e, d)
                poly2 = poly2 + RationalPoly2.separable(w, inner)
            out.append(
                CouplingDefect(
                    order=order,
                    group=m,
                    cstar=cstar,
                    weight_row=weight_row,
                    stages=tuple(i + 1 for i in stages),
                    poly2=poly2,
                    inner_exponent=e,
                    inner_denominator=d,
                )
            )
    return out


def _discrete_coupling_ok(t: FcrknTableau, defect: CouplingDefect) -> bool:
    """Coupling with weights at alpha=1: a beta-polynomial identity on [0, c*]."""
    if defect.cstar == 0:
        return True
    rows = t.stage_rows()
    weights = {"b": t.b_full(), "bp": t.bp}[defect.weight_row]
    acc = RationalPoly.zero()
    for stage in defect.stages:
        w1 = weights[stage - 1](1)
        if w1 == 0:
            continue
        inner = _inner_poly(t, rows[stage - 1], t.c, defect.inner_exponent, defect.inner_denominator)
        acc = acc + inner * w1
    return acc.is_zero()


def _stage_order2_ok(t: FcrknTableau) -> tuple:
    """Simplifying stage conditions: every reachable row sums to alpha^2/2."""
    for stage in range(1, t.s + 1):
        if t.c[stage - 1] == 0:
            continue  # degenerate stage interval, condition vacuous
        if not gamma_stage_poly(t, stage, 2).is_zero():
            return False, f"Gamma_{stage},2"
    return True, ""


def verify_fcrkn_order(t: FcrknTableau) -> OrderReport:
    """Highest uniform/discrete orders (up to 5) certified by exact identities.

    Conditions accumulate: a track reaches order p only if every condition
    through p holds. The solution (u) and derivative (du) tracks are
    certified separately; the method order is the minimum of the two.
    """
    stage_ok, stage_fail = _stage_order2_ok(t)
    stage_cond = ("stage condition " + (stage_fail or "Gamma_i2"), stage_ok)

    gammas = {k: gamma_poly(t, k) for k in range(2, MAX_ORDER + 1)}
    gammas_p = {k: gamma_prime_poly(t, k) for k in range(1, MAX_ORDER + 1)}
    couplings = {4: coupling_defects(t, 4), 5: coupling_defects(t, 5)}

    def coupling_conds(order, weight_row, discrete):
        out = []
        for defect in couplings[order]:
            if defect.weight_row != weight_row:
                continue
            ok = _discrete_coupling_ok(t, defect) if discrete else defect.satisfied()
            out.append((defect.label(), ok))
        return out

    def ladder(track: str, discrete: bool):
        # conditions entering each order, per track
        def gp(k):
            poly = gammas_p[k]
            ok = poly(1) == 0 if discrete else poly.is_zero()
            return (f"Gamma'_{k}" + (" at alpha=1" if discrete else ""), ok)

        def g(k):
            poly = gammas[k]
            ok = poly(1) == 0 if discrete else poly.is_zero()
            return (f"Gamma_{k}" + (" at alpha=1" if discrete else ""), ok)

        if track == "u":
            return {
                2: [g(2)],
                3: [g(3)],
                4: [g(4), stage_cond],
                5: [g(5)] + coupling_conds(5, "b", discrete),
            }
        return {
            1: [gp(1)],
            2: [gp(2)],
            3: [gp(3), stage_cond],
            4: [gp(4)] + coupling_conds(4, "bp", discrete),
            5: [gp(5)] + coupling_conds(5, "bp", discrete),
        }

    failures: list = []

    def climb(conds: dict, base: int, label: str) -> int:
        order = base
        for p in sorted(conds):
            bad = [name for name, ok in conds[p] if not ok]
            if bad:
                failures.append(f"{label} order {p}: {bad[0]}")
                break
            order = p
        return order

    uniform_u = climb(ladder("u", False), 1, "uniform u")
    uniform_du = climb(ladder("du", False), 0, "uniform du")
    discrete_u = climb(ladder("u", True), 1, "discrete u")
    discrete_du = climb(ladder("du", True), 0, "discrete du")
    return OrderReport(
        uniform_u=uniform_u,
        discrete_u=discrete_u,
        uniform_du=uniform_du,
        discrete_du=discrete_du,
        failures=failures,
    )


def quadrature_poly(t: FcrkTableau, j: int) -> RationalPoly:
    """Q_j = sum b_i c_i^(j-1) - alpha^j / j."""
    lhs = _weighted_sum(t.b, t.c, j - 1)
    return lhs - RationalPoly.monomial(j, Fraction(1, j))


def quadrature_defects(t: FcrkTableau, kmax: int) -> list:
    return [DefectPoly("QuadratureQ_k", j, quadrature_poly(t, j)) for j in range(1, kmax + 1)]


def verify_fcrk_quadrature(t: FcrkTableau) -> OrderReport:
    """Quadrature-order certificate for a first-order tableau.

    These conditions are necessary for the corresponding uniform/discrete
    orders but not sufficient; the report carries quadrature_only = True.
    """
    failures: list = []
    uniform = 0
    j = 1
    # Q_j has a -alpha^j/j tail a bounded-degree weight row cannot cancel
    # forever, so the loop terminates; the cap is a safety net.
    while j <= 64:
        if quadrature_poly(t, j).is_zero():
            uniform = j
            j += 1
        else:
            failures.append(f"uniform quadrature order {j}: Q_{j}")
            break
    discrete = 0
    j = 1
    while j <= 64:
        if quadrature_poly(t, j)(1) == 0:
            discrete = j
            j += 1
        else:
            failures.append(f"discrete quadrature order {j}: Q_{j} at alpha=1")
            break
    return OrderReport(
        uniform_u=uniform,
        discrete_u=discrete,
        failures=failures,
        quadrature_only=True,
    )
