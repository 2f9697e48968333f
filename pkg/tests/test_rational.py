"""Exact rational scalar layer."""

import pytest
from hypothesis import given, strategies as st

from smallsphere.errors import InputError
from smallsphere.rational import (Q, format_rational, parse_rational, rat,
                                  rat_add, rat_inv, rat_mul, rat_neg)

rationals = st.builds(Q, st.integers(-10 ** 12, 10 ** 12),
                      st.integers(1, 10 ** 9))


def test_reduction_and_sign_normalization():
    assert rat(2, 4) == rat(1, 2)
    assert rat(-1, -2) == rat(1, 2)
    assert format_rational(rat(3, -6)) == "-1/2"
    assert format_rational(rat(0, 7)) == "0"
    assert format_rational(rat(5)) == "5"


def test_small_denominator_arithmetic():
    assert rat_add(rat(1, 6), rat(1, 3)) == rat(1, 2)


def test_final_coefficient_reduction():
    assert rat(25, 2160) == rat(5, 432)


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        rat_inv(rat(0))


def test_inverse():
    assert rat_inv(rat(-3, 7)) == rat(-7, 3)


@given(rationals, rationals, rationals)
def test_field_axioms(a, b, c):
    assert rat_add(a, b) == rat_add(b, a)
    assert rat_mul(a, b) == rat_mul(b, a)
    assert rat_add(rat_add(a, b), c) == rat_add(a, rat_add(b, c))
    assert rat_mul(rat_mul(a, b), c) == rat_mul(a, rat_mul(b, c))
    assert rat_mul(a, rat_add(b, c)) == rat_add(rat_mul(a, b), rat_mul(a, c))
    assert rat_add(a, rat_neg(a)) == 0


@given(rationals)
def test_inverse_roundtrip(a):
    if a != 0:
        assert rat_mul(a, rat_inv(a)) == 1


@given(st.integers(-10 ** 6, 10 ** 6), st.integers(1, 10 ** 4))
def test_parse_format_roundtrip(num, den):
    value = rat(num, den)
    assert parse_rational(format_rational(value)) == value


def test_parse_rejects_zero_denominator():
    with pytest.raises(InputError):
        parse_rational("3/0")


@pytest.mark.parametrize("token", ["", "x", "1/2/3", "1.5"])
def test_parse_rejects_malformed(token):
    with pytest.raises(InputError):
        parse_rational(token)


def test_parse_accepts_integers_and_negatives():
    assert parse_rational("-7") == -7
    assert parse_rational(" 25/2160 ") == rat(5, 432)
