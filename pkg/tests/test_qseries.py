from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdt.errors import DivideByZero, HoldoutMismatch, InsufficientSamples, NonIntegerCoefficients
from qdt.qseries import CountPoly, TRational, embed_count_poly, half_lefschetz_power, lagrange_interpolate

small = st.integers(-4, 4)
polys = st.lists(small, min_size=0, max_size=4)


def rationals():
    return st.builds(lambda n, d, e: TRational(n, d if any(d) else [1], e), polys, polys, st.integers(-3, 3))


def test_countpoly_basics():
    p = CountPoly([0, 1, 0, 2])
    assert p.degree == 3
    assert p(2) == 18
    assert str(CountPoly([-1, 2])) == "2*q - 1"
    assert CountPoly([1, 1]) * CountPoly([-1, 1]) == CountPoly([-1, 0, 1])
    assert CountPoly([1, 0, 0]) == CountPoly([1])


def test_trational_canonical_string():
    x = TRational.t_power(1) / (TRational.t_power(2) - 1)
    assert x.to_string() == "t/(t^2 - 1)"
    assert TRational(0).to_string() == "0"
    assert TRational.parse("t/(t^2 - 1)") == x
    # same value written two ways
    y = TRational.t_power(4) / ((TRational.t_power(4) - 1) * (TRational.t_power(4) - TRational.t_power(2)))
    assert y.to_string() == "t^2/(t^6 - t^4 - t^2 + 1)"


def test_division_by_zero():
    with pytest.raises(DivideByZero):
        TRational(1) / TRational(0)
    with pytest.raises(ZeroDivisionError):
        TRational(0).inverse()


@settings(max_examples=60, deadline=None)
@given(rationals(), rationals(), rationals())
def test_field_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == TRational(0)
    if a:
        assert a * a.inverse() == TRational(1)


@settings(max_examples=40, deadline=None)
@given(rationals())
def test_string_round_trip(a):
    assert TRational.parse(a.to_string()) == a


def test_embedding():
    assert embed_count_poly(CountPoly([-1, 1])) == TRational.t_power(2) - 1
    assert half_lefschetz_power(-3) * TRational.t_power(3) == TRational(1)


def test_lagrange_recovers_polynomial():
    f = CountPoly([3, 0, -2, 1])
    samples = [(p, f(p)) for p in (2, 3, 5, 7, 11)]
    assert lagrange_interpolate(samples, 3) == f


def test_lagrange_errors():
    with pytest.raises(InsufficientSamples):
        lagrange_interpolate([(2, 1), (3, 2)], 3)
    with pytest.raises(NonIntegerCoefficients):
        lagrange_interpolate([(0, 0), (2, 1)], 1)
    with pytest.raises(HoldoutMismatch):
        lagrange_interpolate([(2, 4), (3, 9), (5, 25), (7, 50)], 2)


def test_fraction_coefficients_survive():
    a = TRational([Fraction(1, 2)], [1])
    assert (a + a) == TRational(1)
