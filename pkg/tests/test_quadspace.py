import itertools
import random
from fractions import Fraction as Fr

import pytest
from hypothesis import given, strategies as st

from gspin_gj.quadspace import (
    SpaceError, affine_measure_fast, affine_preimage_measure, build_space, coset_representatives,
    default_nonsquare, determinant, dual_membership, lattice_preimage_measure, parse_descriptor,
    preimage_lattice_basis, unram,
)


def test_descriptor_layout():
    S = parse_descriptor("n=2,E=split,p=5")
    assert S.labels == ("e1", "e2", "u0", "u1", "f2", "f1")
    assert S.dim == 6 and S.n == 2
    assert S.gram[S.e(1)][S.f(1)] == 1 and S.gram[S.e(1)][S.e(1)] == 0
    assert S.descriptor() == "n=2,E=split,p=5"
    assert S.sub_indices(1) == [1, 2, 3, 4]


def test_unram_norm_form():
    S = parse_descriptor("n=0,E=unram:u=2,p=3")
    # q(a + b sqrt(u)) = a^2 - u b^2
    assert S.q((Fr(1), Fr(1))) == 1 - 2
    assert default_nonsquare(3) == 2 and default_nonsquare(7) == 3


@pytest.mark.parametrize("bad", ["n=1,E=F", "n=1,E=F,p=4", "n=1,E=F,p=2", "n=1,E=unram:u=1,p=3",
                                 "n=1,E=unram:u=3,p=3", "n=-1,E=F,p=3", "n=1,E=ram,p=3", ""])
def test_bad_descriptors(bad):
    with pytest.raises(SpaceError):
        parse_descriptor(bad)


def test_lattice_self_dual():
    for d in ["n=2,E=F,p=3", "n=1,E=split,p=5", "n=1,E=unram:u=2,p=5"]:
        S = parse_descriptor(d)
        for i in range(S.dim):
            assert dual_membership(S.basis_vector(i), S)
            assert not dual_membership(S.basis_vector(i, Fr(1, S.p)), S)


@given(st.lists(st.integers(-5, 5), min_size=4, max_size=4), st.lists(st.integers(-5, 5), min_size=4, max_size=4))
def test_pairing_is_polarization(a, b):
    S = build_space(1, unram(2), 5)
    s = tuple(x + y for x, y in zip(a, b))
    assert S.pair(a, b) == S.q(s) - S.q(a) - S.q(b)
    assert S.pair(a, a) == 2 * S.q(a)


def _unit_matrix(rng, k, p):
    while True:
        A = [[Fr(rng.randint(-4, 4)) for _ in range(k)] for _ in range(k)]
        d = determinant(A)
        if d and d.numerator % p:
            return A


def _mat(A, B):
    return [[sum(A[i][t] * B[t][j] for t in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def _structured(seed, k, p):
    """P diag(p^a) Q with P, Q in GL_k(Z_(p)), a in {-1, 0, 1}: {x : Mx integral} sits in p^-1 O^k."""
    rng = random.Random(seed)
    D = [[Fr(p) ** rng.randint(-1, 1) if i == j else Fr(0) for j in range(k)] for i in range(k)]
    return _mat(_mat(_unit_matrix(rng, k, p), D), _unit_matrix(rng, k, p)), rng


def _integral(x, p):
    return x.denominator % p != 0


def _count(M, b, p, k):
    # points of p^-2 Z^k / p Z^k in {x : Mx + b integral}, each a ball of measure p^-k
    hits = 0
    for idx in itertools.product(range(p**3), repeat=k):
        x = [Fr(i, p * p) for i in idx]
        if all(_integral(sum(r * c for r, c in zip(row, x)) + bi, p) for row, bi in zip(M, b)):
            hits += 1
    return Fr(hits, p**k)


@given(st.integers(0, 10**6))
def test_measure_residue_count(seed):
    p, k = 3, 2
    M, rng = _structured(seed, k, p)
    x0 = [Fr(rng.randint(0, 8), p) for _ in range(k)]
    b = [sum(r * c for r, c in zip(row, x0)) for row in M]
    if rng.random() < 0.5:
        b[rng.randrange(k)] += Fr(rng.randint(1, 2), p)
    want = _count(M, b, p, k)
    assert affine_preimage_measure(M, b, p) == want
    assert affine_measure_fast(M, b, p) == want
    assert lattice_preimage_measure(M, p) == _count(M, [Fr(0)] * k, p, k)


@given(st.integers(0, 10**6), st.sampled_from([3, 5, 7]), st.integers(1, 4))
def test_fast_elimination_matches_fraction_route(seed, p, k):
    rng = random.Random(seed)
    m = k + rng.randint(0, 2)
    A = [[Fr(rng.randint(-9, 9) * p ** rng.randint(0, 2), p ** rng.randint(0, 2)) for _ in range(k)] for _ in range(m)]
    b = [Fr(rng.randint(-9, 9), p ** rng.randint(0, 3)) for _ in range(m)]
    try:
        want = affine_preimage_measure(A, b, p)
    except SpaceError:
        with pytest.raises(SpaceError):
            affine_measure_fast(A, b, p)
        return
    assert affine_measure_fast(A, b, p) == want


def test_preimage_basis_and_cosets():
    p = 3
    M = [[Fr(3), Fr(0)], [Fr(1), Fr(9)]]
    basis = preimage_lattice_basis(M, p)
    for v in basis:
        assert all(_integral(sum(r * c for r, c in zip(row, v)), p) for row in M)
    # the preimage contains O^2 with index 3 * 9 = meas
    reps = coset_representatives(basis, p)
    assert len(reps) == lattice_preimage_measure(M, p) == 27
    assert len({tuple(x % 1 for x in r) for r in reps}) == 27


def test_kernel_raises():
    with pytest.raises(SpaceError):
        lattice_preimage_measure([[Fr(1), Fr(1)], [Fr(2), Fr(2)]], 3)


def test_diag_p_inverse_p_by_count():
    # {x : p x_1, x_2 / p integral} = p^-1 O x p O has measure 1 (the valuations cancel)
    p = 3
    M = [[Fr(p), Fr(0)], [Fr(0), Fr(1, p)]]
    assert lattice_preimage_measure(M, p) == 1 == _count(M, [Fr(0), Fr(0)], p, 2)


@given(st.integers(0, 10**6), st.integers(-1, 1))
def test_measure_scaling(seed, v):
    p, k = 3, 2
    M, _ = _structured(seed, k, p)
    c = Fr(p) ** v
    assert lattice_preimage_measure([[c * x for x in row] for row in M], p) == \
        lattice_preimage_measure(M, p) * Fr(p) ** (k * v)
