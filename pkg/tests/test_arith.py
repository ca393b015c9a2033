from fractions import Fraction as Fr

import pytest
from hypothesis import given, strategies as st

from gspin_gj.arith import (
    PadicVal, TruncSeries, abs_p, as_fraction, is_integral, series_geom, series_product, val_p, vp,
)

rationals = st.fractions(max_denominator=50).filter(lambda x: x != 0)
coeffs = st.lists(st.fractions(max_denominator=9), min_size=1, max_size=6)


def test_valuations():
    assert vp(Fr(18), 3) == 2
    assert vp(Fr(2, 27), 3) == -3
    assert val_p(0, 5) == PadicVal.inf()
    assert is_integral(Fr(5, 2), 3) and not is_integral(Fr(2, 3), 3)
    assert abs_p(Fr(1, 9), 3) == 9
    assert as_fraction("3/4") == Fr(3, 4)


def test_padic_val_order():
    assert PadicVal(1) < PadicVal(2) < PadicVal.inf()
    assert PadicVal(1) + 2 == PadicVal(3)
    assert (PadicVal.inf() + 4).infinite


@given(rationals, rationals)
def test_abs_multiplicative(x, y):
    assert abs_p(x * y, 3) == abs_p(x, 3) * abs_p(y, 3)


def test_geometric_product_oracle():
    # (1 - X)^{-1} (1 - 2X)^{-1} = sum (2^{k+1} - 1) X^k
    s = series_product([series_geom(1, 1, 5), series_geom(2, 1, 5)], 5)
    assert s.as_strings() == ["1", "3", "7", "15", "31", "63"]


def test_geom_in_square_variable():
    assert series_geom(3, 2, 5).as_strings() == ["1", "0", "3", "0", "9", "0"]


@given(coeffs.map(lambda c: [Fr(1)] + c))
def test_inverse_roundtrip(c):
    s = TruncSeries(c, 6)
    assert s * s.inverse() == TruncSeries.one(6)


@given(coeffs, coeffs)
def test_product_commutes(a, b):
    assert TruncSeries(a, 5) * TruncSeries(b, 5) == TruncSeries(b, 5) * TruncSeries(a, 5)


def test_pow_and_scale():
    s = TruncSeries([1, 1], 4)
    assert (s ** 3).as_strings() == ["1", "3", "3", "1", "0"]
    assert s.scale_var(Fr(1, 2)).as_strings() == ["1", "1/2", "0", "0", "0"]


def test_inverse_needs_unit_constant():
    with pytest.raises(Exception):
        TruncSeries([0, 1], 3).inverse()
