import random
from fractions import Fraction as Fr

import pytest
from hypothesis import given, strategies as st

from gspin_gj.arith import TruncSeries, series_geom
from gspin_gj.lfun import (
    SatakeData, SatakeError, basic_function_coeffs, dV, parse_satake, random_satake, rebase, standard_L,
    theorem_shift, zeta,
)
from gspin_gj.quadspace import parse_descriptor

SPLIT1 = parse_descriptor("n=1,E=split,p=3")


def test_parse_satake():
    S = parse_descriptor("n=2,E=F,p=3")
    sd = parse_satake("2,-1/3;E=5", S)
    assert sd.a == (2, Fr(-1, 3)) and sd.evals == (5,) and sd.omega == 5
    assert sd.a_prime == (Fr(5, 2), -15)
    assert parse_satake("3;E=1/2,4", SPLIT1).omega == 2
    assert parse_satake("E=7", parse_descriptor("n=0,E=F,p=3")).a == ()


@pytest.mark.parametrize("bad", ["2;E=5", "1,2,3;E=5", "1,0;E=1", "1,x;E=2", "1,2"])
def test_parse_satake_errors(bad):
    with pytest.raises(SatakeError):
        parse_satake(bad, parse_descriptor("n=2,E=F,p=3"))


def test_split_needs_two_values():
    with pytest.raises(SatakeError):
        parse_satake("3;E=2", SPLIT1)


def test_standard_L_split_oracle():
    # a = 2, a' = omega/a = 3/4, E-part (1/2, 3): e1 = 25/4, h2 = e1^2 - e2 = 423/16
    sd = SatakeData.make([2], [Fr(1, 2), 3], "split")
    assert standard_L(sd, SPLIT1, 2).as_strings() == ["1", "25/4", "423/16"]


def test_standard_L_trivial_and_unram():
    S0 = parse_descriptor("n=0,E=F,p=3")
    assert standard_L(SatakeData.make([], [5]), S0, 3).as_strings() == ["1", "0", "0", "0"]
    Su = parse_descriptor("n=0,E=unram:u=2,p=3")
    assert standard_L(SatakeData.make([], [5], "unram"), Su, 4).as_strings() == ["1", "0", "5", "0", "25"]


def test_zeta_shifts():
    # zeta(a, 2s - 2) in X_{-3/2}: q^{-2s} = q^{-3} X^2, so factor (1 - a q^{-1} X^2)^{-1}
    z = zeta(Fr(6), 4, k=2, c=Fr(-3, 2), j=2, q=3)
    assert z == series_geom(2, 2, 4)
    with pytest.raises(SatakeError):
        zeta(1, 3, k=1, c=Fr(1, 2), j=0, q=3)


def test_dV():
    sd = SatakeData.make([], [2])
    assert dV(sd, 1, 4, 3) == TruncSeries([1, 0, -2], 4)
    assert dV(sd, 3, 4, 3) == TruncSeries.one(4)
    assert dV(sd, 5, 4, 3, c=Fr(-3, 2)) == zeta(2, 4, k=2, c=Fr(-3, 2), j=2, q=3)
    assert theorem_shift(5) == Fr(-3, 2)


@given(st.lists(st.fractions(max_denominator=5), min_size=1, max_size=5), st.integers(-2, 2))
def test_rebase_roundtrip(c, d):
    s = TruncSeries(c, 5)
    assert rebase(rebase(s, 0, d, 3), d, 0, 3) == s
    with pytest.raises(SatakeError):
        rebase(s, 0, Fr(1, 2), 3)


def test_basic_function_coeffs():
    pp, p = basic_function_coeffs(4, 3, 3)
    assert pp[:3] == [1, 10, 91] and p == [1, 9, 81, 729]
    pp, p = basic_function_coeffs(3, 5, 3)
    assert p == [1, 0, 0, 0] and pp == [1, 1, 1, 1]


@given(st.integers(2, 8), st.sampled_from([3, 5, 7]))
def test_p_prime_is_partial_sum(d, q):
    pp, p = basic_function_coeffs(d, q, 10)
    assert all(pp[m] == sum(p[: m + 1]) for m in range(11))


def test_random_satake_range():
    rng = random.Random(1)
    for _ in range(50):
        sd = random_satake(SPLIT1, rng)
        assert all(x and -9 <= x <= 9 for x in sd.a + sd.evals)
