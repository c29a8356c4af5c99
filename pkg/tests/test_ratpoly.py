import random
from fractions import Fraction

import pytest

from fcrk.ratpoly import RationalPoly, RationalPoly2


def test_trailing_zeros_normalized():
    p = RationalPoly([1, 2, 0, 0])
    assert p.coeffs == (Fraction(1), Fraction(2))
    assert RationalPoly([0, 0]).is_zero()
    assert RationalPoly().coeffs == ()
    assert RationalPoly().degree == -1


def test_equality_and_hash():
    a = RationalPoly([0, 1, Fraction(-5, 4)])
    b = RationalPoly(["0", "1", "-5/4"])
    assert a == b
    assert hash(a) == hash(b)
    assert a != RationalPoly([0, 1])


def test_arithmetic_matches_pointwise_evaluation():
    rng = random.Random(20240811)

    def rand_poly():
        deg = rng.randrange(0, 5)
        return RationalPoly([Fraction(rng.randrange(-9, 10), rng.randrange(1, 8)) for _ in range(deg + 1)])

    for _ in range(50):
        p, q = rand_poly(), rand_poly()
        x = Fraction(rng.randrange(-20, 21), rng.randrange(1, 13))
        assert (p + q)(x) == p(x) + q(x)
        assert (p - q)(x) == p(x) - q(x)
        assert (p * q)(x) == p(x) * q(x)
        assert (p * 3)(x) == 3 * p(x)


def test_rational_evaluation_is_exact():
    p = RationalPoly([0, 1, Fraction(-5, 4), Fraction(1, 2)])
    assert p(1) == Fraction(1, 4)
    assert isinstance(p(Fraction(1, 3)), Fraction)


def test_float_evaluation_returns_float():
    p = RationalPoly([0, 1, Fraction(-5, 4), Fraction(1, 2)])
    val = p(0.5)
    assert isinstance(val, float)
    assert val == pytest.approx(0.5 - 1.25 * 0.25 + 0.5 * 0.125)


def test_monomial_and_antiderivative():
    m = RationalPoly.monomial(3, Fraction(1, 2))
    assert m.coeffs == (0, 0, 0, Fraction(1, 2))
    assert m.antiderivative().coeffs == (0, 0, 0, 0, Fraction(1, 8))
    assert m.integral() == Fraction(1, 8)
    assert RationalPoly([0, 1]).integral(0, 2) == 2


def test_immutability():
    p = RationalPoly([1])
    with pytest.raises(AttributeError):
        p.coeffs = ()


def test_rejects_floats():
    with pytest.raises(TypeError):
        RationalPoly([0.5])


def test_bivariate_separable_and_eval():
    pa = RationalPoly([0, 1])  # alpha
    pb = RationalPoly([0, 0, 0, Fraction(-1, 6)])  # -beta^3/6
    q = RationalPoly2.separable(pa, pb)
    assert q(Fraction(1, 2), Fraction(1, 3)) == Fraction(1, 2) * Fraction(-1, 6) * Fraction(1, 27)
    assert not q.is_zero()
    assert (q + RationalPoly2.separable(pa, RationalPoly([0, 0, 0, Fraction(1, 6)]))).is_zero()


def test_bivariate_zero_products_drop_out():
    z = RationalPoly2.separable(RationalPoly(), RationalPoly([1, 2]))
    assert z.is_zero()
    assert z(1, 1) == 0
