"""Exact rational polynomials in one and two variables.

These are the entry type of the continuous Butcher tableaux: every tableau
entry is a polynomial in the local coordinate alpha with Fraction
coefficients, so consistency and order conditions can be checked as exact
polynomial identities, without tolerances.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str, Rational)):
        return Fraction(x)
    raise TypeError(f"exact coefficient expected, got {type(x).__name__}")


class RationalPoly:
    """Univariate polynomial with exact rational coefficients.

    Coefficients are stored in ascending powers (``coeffs[k]`` multiplies
    ``x**k``). Trailing zeros are normalized away; the zero polynomial has an
    empty coefficient tuple.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [_as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("RationalPoly is immutable")

    @classmethod
    def monomial(cls, k: int, coeff=1) -> "RationalPoly":
        return cls([0] * k + [coeff])

    @classmethod
    def zero(cls) -> "RationalPoly":
        return _ZERO

    @property
    def degree(self) -> int:
        """Degree, with the zero polynomial assigned -1."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, RationalPoly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        if not isinstance(other, RationalPoly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] += c
        return RationalPoly(out)

    def __neg__(self):
        return RationalPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, RationalPoly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, RationalPoly):
            if self.is_zero() or other.is_zero():
                return _ZERO
            out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                if a:
                    for j, b in enumerate(other.coeffs):
                        out[i + j] += a * b
            return RationalPoly(out)
        return RationalPoly([c * _as_fraction(other) for c in self.coeffs])

    __rmul__ = __mul__

    def __call__(self, x):
        """Evaluate by Horner's rule; a rational input gives an exact result."""
        if isinstance(x, float):
            r = 0.0
            for c in reversed(self.float_coeffs()):
                r = r * x + c
            return r
        x = _as_fraction(x)
        r = Fraction(0)
        for c in reversed(self.coeffs):
            r = r * x + c
        return r

    def antiderivative(self) -> "RationalPoly":
        """Antiderivative with zero constant term."""
        return RationalPoly([0] + [c / (k + 1) for k, c in enumerate(self.coeffs)])

    def integral(self, a=0, b=1) -> Fraction:
        anti = self.antiderivative()
        return anti(_as_fraction(b)) - anti(_as_fraction(a))

    def float_coeffs(self) -> tuple:
        return tuple(float(c) for c in self.coeffs)

    def __repr__(self):
        if self.is_zero():
            return "RationalPoly([])"
        return f"RationalPoly([{', '.join(str(c) for c in self.coeffs)}])"

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                parts.append(str(c))
            elif k == 1:
                parts.append(f"{c}*a")
            else:
                parts.append(f"{c}*a^{k}")
        return " + ".join(parts).replace("+ -", "- ")


_ZERO = RationalPoly()


class RationalPoly2:
    """Bivariate polynomial with exact rational coefficients.

    Used for the coupling defects, which are sums of separable products
    w(alpha) * g(beta). Coefficients are stored sparsely keyed by the
    (alpha-power, beta-power) pair.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        cleaned = {}
        for key, val in (coeffs or {}).items():
            val = _as_fraction(val)
            if val:
                cleaned[(int(key[0]), int(key[1]))] = val
        object.__setattr__(self, "coeffs", cleaned)

    def __setattr__(self, name, value):
        raise AttributeError("RationalPoly2 is immutable")

    @classmethod
    def separable(cls, pa: RationalPoly, pb: RationalPoly) -> "RationalPoly2":
        """The product pa(alpha) * pb(beta)."""
        out = {}
        for i, a in enumerate(pa.coeffs):
            if a:
                for j, b in enumerate(pb.coeffs):
                    if b:
                        out[(i, j)] = a * b
        return cls(out)

    def __add__(self, other):
        if not isinstance(other, RationalPoly2):
            return NotImplemented
        out = dict(self.coeffs)
        for key, val in other.coeffs.items():
            out[key] = out.get(key, Fraction(0)) + val
        return RationalPoly2(out)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if isinstance(other, RationalPoly2):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __call__(self, alpha, beta):
        """Exact evaluation at a rational point."""
        alpha = _as_fraction(alpha)
        beta = _as_fraction(beta)
        return sum(
            (c * alpha**i * beta**j for (i, j), c in self.coeffs.items()),
            Fraction(0),
        )

    def __repr__(self):
        if self.is_zero():
            return "RationalPoly2({})"
        terms = ", ".join(f"(a^{i} b^{j}): {c}" for (i, j), c in sorted(self.coeffs.items()))
        return f"RationalPoly2({{{terms}}})"
