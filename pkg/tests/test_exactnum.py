from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mbl.errors import ParseError
from mbl.exactnum import GaussianRational, as_gr, as_rational, format_scalar, parse_scalar, pochhammer

fractions = st.fractions(max_denominator=50).filter(lambda q: abs(q) < 10**6)
gaussians = st.builds(GaussianRational, fractions, fractions)


@given(gaussians)
def test_format_parse_round_trip(x):
    assert parse_scalar(format_scalar(x)) == x


@given(gaussians, gaussians, gaussians)
def test_field_axioms(x, y, z):
    assert (x + y) * z == x * z + y * z
    assert x * y == y * x
    if y:
        assert (x / y) * y == x


@given(gaussians.filter(bool))
def test_inverse(x):
    assert x * x.inverse() == 1


@pytest.mark.parametrize("text,re,im", [
    ("1/2", Fraction(1, 2), 0), ("-3", -3, 0), ("i", 0, 1), ("-2*i", 0, -2),
    ("1-i", 1, -1), ("1/2+3/4*i", Fraction(1, 2), Fraction(3, 4)), (" 5 / 7 ", Fraction(5, 7), 0),
])
def test_parse_forms(text, re, im):
    assert parse_scalar(text) == GaussianRational(re, im)


@pytest.mark.parametrize("bad", ["1//2", "", "1/0", "abc", "1.5"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_scalar(bad)


def test_parse_error_location():
    with pytest.raises(ParseError) as exc:
        parse_scalar("1//2", line=3, column=7)
    assert exc.value.line == 3 and exc.value.column is not None


def test_floats_refused():
    with pytest.raises(TypeError):
        as_rational(0.5)


def test_pochhammer():
    assert pochhammer(Fraction(3), 0) == 1
    assert pochhammer(Fraction(3), 3) == 3 * 4 * 5
    assert pochhammer(Fraction(-2), 3) == 0


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        as_gr(1) / as_gr(0)
