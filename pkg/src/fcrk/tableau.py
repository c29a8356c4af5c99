"""Continuous Butcher tableaux with exact rational entries.

A first-order method is a triple (A(.), b(.), c) whose entries are
polynomials in the local coordinate alpha; a second-order (Nystrom-type)
method adds a derivative weight row b'(.). The four built-in methods reuse
the last stage of a step as the first stage of the next one, so their last
abscissa is 1 and their weight rows are tied to the last stage row.

Everything here is exact: coefficients are Fractions, and structural
validation is performed with rational arithmetic, never with tolerances.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .ratpoly import RationalPoly

ZERO = RationalPoly.zero()


def _p(spec: str) -> RationalPoly:
    """Polynomial from space-separated rational coefficients, ascending powers."""
    return RationalPoly([Fraction(tok) for tok in spec.split()])


def _c(spec: str) -> tuple:
    return tuple(Fraction(tok) for tok in spec.split())


def _pad(row, s):
    row = tuple(row)
    return row + (ZERO,) * (s - len(row))


class MethodId(enum.Enum):
    """Identifiers of the built-in reuse methods."""

    FCRK3R = "fcrk3r"
    FCRK4R = "fcrk4r"
    FCRKN3R = "fcrkn3r"
    FCRKN4R = "fcrkn4r"

    @classmethod
    def parse(cls, name: str) -> "MethodId":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise KeyError(f"unknown method id {name!r}") from None


@dataclass(frozen=True)
class FcrkTableau:
    """Explicit continuous Runge-Kutta tableau for first-order problems.

    A is stored as a full s-by-s matrix of polynomials; entries on and above
    the diagonal are the canonical zero polynomial so index arithmetic stays
    uniform.
    """

    s: int
    c: tuple
    A: tuple
    b: tuple
    reuse: bool = True

    @property
    def kind(self) -> str:
        return "fcrk"

    def stage_rows(self) -> tuple:
        return self.A


@dataclass(frozen=True)
class FcrknTableau:
    """Explicit continuous Runge-Kutta-Nystrom tableau with last-stage reuse.

    The b row doubles as the coefficient row of the reused stage s, which
    makes the tie b_i(alpha) = a_si(alpha) hold by construction; A holds the
    rows of stages 2..s-1 only. bp is the derivative weight row (s entries).
    """

    s: int
    c: tuple
    A: tuple
    b: tuple
    bp: tuple
    reuse: bool = True

    @property
    def kind(self) -> str:
        return "fcrkn"

    def stage_rows(self) -> tuple:
        """All s stage rows, zero-padded; row s aliases the b polynomials."""
        first = (_pad((), self.s),)
        last = (_pad(self.b, self.s),)
        return first + self.A + last

    def b_full(self) -> tuple:
        """The b weights extended with the identically-zero last entry."""
        return _pad(self.b, self.s)


def _fcrk3r() -> FcrkTableau:
    s = 4
    A = (
        _pad((), s),
        _pad((_p("0 1"),), s),
        _pad((_p("0 1 -1"), _p("0 0 1")), s),
        _pad((_p("0 1 -3/4"), ZERO, _p("0 0 3/4")), s),
    )
    b = (_p("0 1 -5/4 1/2"), ZERO, _p("0 0 9/4 -3/2"), _p("0 0 -1 1"))
    return FcrkTableau(s=s, c=_c("0 1/2 2/3 1"), A=A, b=b)


def _fcrk4r() -> FcrkTableau:
    s = 7
    a51 = _p("0 1 -202/105 323/315")
    a53 = _p("0 0 5415/2324 -6137/3486")
    a54 = _p("0 0 -2023/4980 5491/7470")
    A = (
        _pad((), s),
        _pad((_p("0 1"),), s),
        _pad((_p("0 1 -5/4"), _p("0 0 5/4")), s),
        _pad((_p("0 1 -5/4"), _p("0 0 5/4")), s),
        _pad((a51, ZERO, a53, a54), s),
        _pad((a51, ZERO, a53, a54), s),
        # a71's quadratic coefficient is pinned by the two reuse identities
        # sum_j a_7j(alpha) = alpha and a_71(1) = b_1(1).
        _pad(
            (
                _p("0 1 -219/110 182/165"),
                ZERO,
                ZERO,
                ZERO,
                _p("0 0 1078/445 -2548/1335"),
                _p("0 0 -845/1958 2366/2937"),
            ),
            s,
        ),
    )
    b = (
        _p("0 1 -137/55 401/165 -91/110"),
        ZERO,
        ZERO,
        ZERO,
        _p("0 0 15092/4005 -21952/4005 8918/4005"),
        _p("0 0 -10985/3916 41743/5874 -15379/3916"),
        _p("0 0 55/36 -73/18 91/36"),
    )
    return FcrkTableau(s=s, c=_c("0 2/5 7/19 15/17 5/14 11/13 1"), A=A, b=b)


def _fcrkn3r() -> FcrknTableau:
    s = 3
    A = (_pad((_p("0 0 1/2"),), s),)
    b = (_p("0 0 1/2 -1/3"), _p("0 0 0 1/3"))
    bp = (_p("0 1 -3/2 2/3"), _p("0 0 2 -4/3"), _p("0 0 -1/2 2/3"))
    return FcrknTableau(s=s, c=_c("0 1/2 1"), A=A, b=b, bp=bp)


def _fcrkn4r() -> FcrknTableau:
    s = 5
    A = (
        _pad((_p("0 0 1/2"),), s),
        _pad((_p("0 0 1/2 -11/24"), _p("0 0 0 11/24")), s),
        _pad((_p("0 0 1/2 -295/696"), _p("0 0 0 253/232"), _p("0 0 0 -2/3")), s),
    )
    b = (
        _p("0 0 1/2 -5209361/7811208 4299619/15622416"),
        _p("0 0 0 960839/1446520 -5770963/8679120"),
        _p("0 0 0 7/43 7/43"),
        _p("0 0 0 -781726/4882005 4431163/19528020"),
    )
    bp = (
        _p("0 1 -461/180 23/9 -319/360"),
        ZERO,
        _p("0 0 219501/57380 -48778/8607 268279/114760"),
        _p("0 0 -6655/2718 17303/2718 -38599/10872"),
        _p("0 0 45/38 -371/114 319/152"),
    )
    return FcrknTableau(s=s, c=_c("0 4/11 10/29 9/11 1"), A=A, b=b, bp=bp)


_BUILDERS = {
    MethodId.FCRK3R: _fcrk3r,
    MethodId.FCRK4R: _fcrk4r,
    MethodId.FCRKN3R: _fcrkn3r,
    MethodId.FCRKN4R: _fcrkn4r,
}

_CACHE: dict = {}


def builtin(method: "MethodId | str"):
    """Return the built-in tableau for a method id (tableaux are immutable)."""
    if isinstance(method, str):
        method = MethodId.parse(method)
    if method not in _CACHE:
        _CACHE[method] = _BUILDERS[method]()
    return _CACHE[method]


def validate_structure(t) -> list:
    """Check all structural invariants; returns violation descriptors.

    An empty list means the tableau is structurally valid. Violations are
    data, not errors: each string names the broken invariant and the
    offending index (1-based, matching tableau conventions).
    """
    if isinstance(t, FcrkTableau):
        return _validate_fcrk(t)
    if isinstance(t, FcrknTableau):
        return _validate_fcrkn(t)
    raise TypeError(f"not a tableau: {type(t).__name__}")


def _validate_common(t, out):
    s = t.s
    if len(t.c) != s:
        out.append(f"abscissa count {len(t.c)} does not match stage count {s}")
        return False
    if t.c[0] != 0:
        out.append("c_1 must be 0")
    for i, ci in enumerate(t.c):
        if ci < 0:
            out.append(f"abscissa c_{i + 1} = {ci} is negative")
    return True


def _validate_fcrk(t: FcrkTableau) -> list:
    out: list = []
    if not _validate_common(t, out):
        return out
    s = t.s
    if len(t.A) != s or any(len(row) != s for row in t.A):
        out.append("A is not an s-by-s matrix")
        return out
    if len(t.b) != s:
        out.append(f"weight count {len(t.b)} does not match stage count {s}")
        return out
    for i in range(s):
        for j in range(s):
            if j >= i and not t.A[i][j].is_zero():
                out.append(f"A not strictly lower triangular at a_{i + 1}{j + 1}")
            if t.A[i][j].coeffs and t.A[i][j].coeffs[0] != 0:
                out.append(f"stage row nonzero at alpha=0: a_{i + 1}{j + 1}")
    for i, bi in enumerate(t.b):
        if bi.coeffs and bi.coeffs[0] != 0:
            out.append(f"weights nonzero at alpha=0: b_{i + 1}")
    if t.reuse:
        if t.c[-1] != 1:
            out.append("reuse requires c_s = 1")
        else:
            for i in range(s - 1):
                if t.b[i](1) != t.A[s - 1][i](1):
                    out.append(
                        f"reuse endpoint mismatch: b_{i + 1}(1) = {t.b[i](1)}"
                        f" but a_{s}{i + 1}(1) = {t.A[s - 1][i](1)}"
                    )
            if t.b[s - 1](1) != 0:
                out.append(f"reuse requires b_{s}(1) = 0, got {t.b[s - 1](1)}")
    return out


def _validate_fcrkn(t: FcrknTableau) -> list:
    out: list = []
    if not _validate_common(t, out):
        return out
    s = t.s
    if len(t.A) != s - 2:
        out.append(f"A must hold rows for stages 2..{s - 1}, got {len(t.A)} rows")
        return out
    if len(t.b) != s - 1:
        out.append(f"b must have {s - 1} entries, got {len(t.b)}")
        return out
    if len(t.bp) != s:
        out.append(f"bp must have {s} entries, got {len(t.bp)}")
        return out
    for i, row in enumerate(t.stage_rows()):
        stage = i + 1
        for j, a in enumerate(row):
            if j >= i and not a.is_zero():
                out.append(f"A not strictly lower triangular at a_{stage}{j + 1}")
            if a.coeffs and a.coeffs[0] != 0:
                out.append(f"stage row nonzero at alpha=0: a_{stage}{j + 1}")
    for name, weights in (("b", t.b), ("bp", t.bp)):
        for i, w in enumerate(weights):
            if w.coeffs and w.coeffs[0] != 0:
                out.append(f"weights nonzero at alpha=0: {name}_{i + 1}")
    if t.c[-1] != 1:
        out.append("reuse requires c_s = 1")
    # The tie b_i(alpha) = a_si(alpha) holds by construction (shared row);
    # the derivative weights must additionally integrate to the endpoint
    # weights for the reused stage to extend the derivative continuously.
    for i in range(s):
        bi1 = t.b[i](1) if i < s - 1 else Fraction(0)
        integ = t.bp[i].integral()
        if integ != bi1:
            out.append(
                f"reuse integral mismatch at stage {i + 1}:"
                f" integral of bp_{i + 1} = {integ} but b_{i + 1}(1) = {bi1}"
            )
    return out
