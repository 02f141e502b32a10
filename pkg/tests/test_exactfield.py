from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from overlapq import (
    FieldElement,
    format_field,
    parse_field,
    rational_pow_bounds,
)
from overlapq.exactfield import FieldParseError

fractions = st.fractions(
    min_value=Fraction(-50), max_value=Fraction(50), max_denominator=60
)


@given(fractions, fractions)
def test_rational_embedding_respects_arithmetic(a, b):
    fa = FieldElement.from_rational(a)
    fb = FieldElement.from_rational(b)
    assert fa + fb == FieldElement.from_rational(a + b)
    assert fa * fb == FieldElement.from_rational(a * b)
    assert fa - fb == FieldElement.from_rational(a - b)


@given(fractions, fractions)
def test_comparison_matches_rationals(a, b):
    fa = FieldElement.from_rational(a)
    fb = FieldElement.from_rational(b)
    assert (fa < fb) == (a < b)
    assert (fa == fb) == (a == b)
    assert (fa <= fb) == (a <= b)


def test_quadratic_sign_determination():
    # (sqrt(5) - 1) / 2 is positive; its conjugate partner is negative
    phi_inv = FieldElement.radical(Fraction(-1, 2), Fraction(1, 2), 5)
    assert phi_inv > FieldElement.from_rational(0)
    assert phi_inv < FieldElement.from_rational(1)
    # squares to 1 - phi_inv: x^2 + x - 1 = 0
    assert phi_inv * phi_inv == FieldElement.from_rational(1) - phi_inv


def test_rational_bounds_are_a_true_enclosure():
    x = FieldElement.radical(0, 1, 2)
    lo, hi = x.rational_bounds(Fraction(1, 10**20))
    assert lo < hi
    assert hi - lo <= Fraction(2, 10**20)
    assert lo * lo <= Fraction(2) <= hi * hi


@given(
    st.fractions(min_value=Fraction(1, 40), max_value=Fraction(40), max_denominator=40),
    st.fractions(min_value=Fraction(0), max_value=Fraction(3), max_denominator=24),
)
def test_pow_bounds_bracket_the_float_value(x, e):
    lo, hi = rational_pow_bounds(x, e)
    truth = float(x) ** float(e)
    assert float(lo) <= truth * (1 + 1e-12) + 1e-300
    assert float(hi) >= truth * (1 - 1e-12)
    assert lo <= hi


def test_pow_bounds_exact_on_integer_exponents():
    assert rational_pow_bounds(Fraction(3, 7), Fraction(2)) == (
        Fraction(9, 49),
        Fraction(9, 49),
    )
    assert rational_pow_bounds(Fraction(5, 2), Fraction(0)) == (Fraction(1), Fraction(1))


def test_pow_bounds_huge_exponent_falls_back_but_still_brackets():
    # bisection-style exponent with a power-of-two denominator
    e = Fraction(2**22 + 3, 2**22)
    x = Fraction(2, 3)
    lo, hi = rational_pow_bounds(x, e)
    truth = math.exp(float(e) * math.log(float(x)))
    assert float(lo) <= truth <= float(hi)
    assert 0 < lo < hi


def test_pow_bounds_extreme_magnitude_stays_positive():
    # deep-level path weights: tiny base, large fractional exponent
    x = Fraction(1, 10**40)
    e = Fraction(12345, 2**14)
    lo, hi = rational_pow_bounds(x, e)
    truth = 10.0 ** (-40 * float(e))
    assert 0 < lo <= hi
    assert float(lo) <= truth <= float(hi)


def test_format_parse_roundtrip():
    x = FieldElement.radical(Fraction(1, 2), Fraction(3, 7), 5)
    again = parse_field(format_field(x))
    assert again == x


def test_parse_rejects_garbage():
    with pytest.raises(FieldParseError):
        parse_field("3 + sqrt")
