"""Scalar arithmetic: worked examples and algebraic properties."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from novibar import (
    INFINITY,
    NotAUnit,
    NovikovScalar,
    ValuationOrder,
    divide_in_ring,
    invert_unit,
    parse_scalar,
)
from novibar.scalars import format_scalar

S = NovikovScalar.of


def test_add_mod2_cancellation():
    # (1 + T) + (T + T^2) = 1 + T^2
    assert S(0, 1) + S(1, 2) == S(0, 2)


def test_add_self_is_zero():
    x = S(0, Fraction(1, 2), 3)
    assert (x + x).is_zero()


def test_add_truncates_at_min_precision():
    x = S(0, precision=3)
    y = S(5, precision=10)
    out = x + y
    assert out == S(0, precision=3)
    assert out.precision == 3


def test_mul_frobenius():
    assert S(0, 1) * S(0, 1) == S(0, 2)


def test_mul_monomials_add_exponents():
    assert S(Fraction(1, 2)) * S(Fraction(1, 3)) == S(Fraction(5, 6))


def test_mul_zero_annihilates_with_infinite_precision():
    x = S(1, 2, precision=4)
    out = NovikovScalar.zero() * x
    assert out.is_zero()
    assert out.precision == INFINITY


def test_mul_precision_rule():
    x = S(1, precision=5)  # valuation 1
    y = S(2, precision=7)  # valuation 2
    out = x * y
    assert out.precision == min(5 + 2, 7 + 1)


def test_invert_unit_identity():
    assert invert_unit(NovikovScalar.one()) == NovikovScalar.one()


def test_invert_unit_geometric_series():
    x = S(0, 1, precision=3)
    assert invert_unit(x) == S(0, 1, 2, precision=3)


def test_invert_unit_rejects_positive_valuation():
    with pytest.raises(NotAUnit):
        invert_unit(S(1))


def test_invert_unit_needs_precision_for_series():
    with pytest.raises(ValueError):
        invert_unit(S(0, 1))


def test_divide_monomials():
    assert divide_in_ring(S(2), S(Fraction(1, 2))) == S(Fraction(3, 2))


def test_divide_factor_out():
    assert divide_in_ring(S(1, 2), S(1)) == S(0, 1)


def test_divide_valuation_order():
    with pytest.raises(ValuationOrder):
        divide_in_ring(S(0), S(1))


def test_text_round_trip():
    x = S(0, Fraction(3, 2))
    assert format_scalar(x) == "T^0 + T^{3/2}"
    assert parse_scalar("T^0 + T^{3/2}") == x
    assert parse_scalar("0").is_zero()
    assert parse_scalar("1 + T^{1}") == S(0, 1)


exponents = st.fractions(
    min_value=-3, max_value=6, max_denominator=6
)
scalars = st.builds(
    lambda exps: NovikovScalar.of(*exps),
    st.lists(exponents, max_size=5),
)


@given(scalars, scalars)
@settings(max_examples=150, deadline=None)
def test_ultrametric_inequality(x, y):
    v = (x + y).valuation()
    assert v >= min(x.valuation(), y.valuation())
    if x.valuation() != y.valuation():
        assert v == min(x.valuation(), y.valuation())


@given(scalars, scalars)
@settings(max_examples=150, deadline=None)
def test_multiplicativity_of_valuation(x, y):
    if x.is_zero() or y.is_zero():
        assert (x * y).is_zero()
    else:
        assert (x * y).valuation() == x.valuation() + y.valuation()


@given(scalars)
@settings(max_examples=100, deadline=None)
def test_inverse_multiplies_to_one(x):
    shifted = x.shift(-x.valuation()) if not x.is_zero() else NovikovScalar.one()
    inv = invert_unit(shifted, precision=8)
    product = shifted * inv
    residue = product + NovikovScalar.one()
    assert residue.is_zero() or residue.valuation() >= product.precision


@given(scalars, scalars, scalars)
@settings(max_examples=100, deadline=None)
def test_ring_laws(x, y, z):
    assert x + y == y + x
    assert (x + y) + z == x + (y + z)
    assert x * y == y * x
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z


@given(scalars, scalars)
@settings(max_examples=80, deadline=None)
def test_doubling_precision_is_conservative(x, y):
    # Recomputing a product at doubled precision never changes the
    # terms below the original bound.
    p = Fraction(4)
    low = (x.truncate(p) * y.truncate(p)).truncate(p)
    high = (x.truncate(2 * p) * y.truncate(2 * p)).truncate(p)
    keep = min(low.precision, high.precision)
    assert {e for e in low.terms if e < keep} == {e for e in high.terms if e < keep}
