import random
from fractions import Fraction as Fr

import pytest
from hypothesis import given, strategies as st

from gspin_gj import gspin as G
from gspin_gj.clifford import CliffordAlgebra, filtration_degree, u_pairs
from gspin_gj.quadspace import parse_descriptor

ALGS = {d: CliffordAlgebra(parse_descriptor(d)) for d in
        ["n=1,E=F,p=3", "n=2,E=F,p=5", "n=1,E=split,p=3", "n=1,E=unram:u=2,p=5", "n=2,E=split,p=3"]}
algs = st.sampled_from(list(ALGS.values()))
seeds = st.integers(0, 10**9)


def test_m_times_m_star_is_central():
    alg = ALGS["n=2,E=F,p=5"]
    for i in (1, 2):
        for t in (Fr(5), Fr(-2, 3)):
            assert G.m_i(alg, i, t) * G.m_i_star(alg, i, t) == G.z(alg, t)


def test_dim3_torus_action_and_modulus():
    alg = ALGS["n=1,E=F,p=3"]  # basis e1, u0, f1
    t = G.to_gspin(G.m_i(alg, 1, 3))
    assert t.nu == 3
    assert G.action_matrix(t) == [[Fr(1, 3), 0, 0], [0, 1, 0], [0, 0, 3]]
    assert G.delta_B(t) == 3
    h = G.build_hU(alg, 1, 3)
    assert G.action_matrix(h) == [[3, 0, 0], [0, 1, 0], [0, 0, Fr(1, 3)]]
    assert G.delta_B(h) == Fr(1, 3)
    # m_1(p) in dim 5 scales three root spaces of N
    alg5 = ALGS["n=2,E=F,p=5"]
    assert G.delta_B(G.to_gspin(G.m_i(alg5, 1, 5))) == 125


def test_hU_similitude():
    alg = ALGS["n=2,E=split,p=3"]
    h = G.build_hU(alg, 2, Fr(7))
    ok, nu = G.is_gspin(h.g)
    assert ok and nu == 49 == h.nu
    assert G.stabilizes_U(h, 2)


@given(algs, seeds)
def test_random_elements_are_gspin(alg, seed):
    rng = random.Random(seed)
    g = G.random_gspin(alg, rng)
    ok, nu = G.is_gspin(g.g)
    assert ok and nu == g.nu
    k = G.random_integral_k(alg, rng)
    ok, nu = G.is_gspin(k.g)
    assert ok and nu == k.nu and k.g.is_integral() and Fr(k.nu).numerator % alg.p


@given(algs, seeds)
def test_action_is_right_action(alg, seed):
    rng = random.Random(seed)
    g, h = G.random_gspin(alg, rng, pairs=1), G.random_gspin(alg, rng, pairs=1)
    v = [Fr(rng.randint(-3, 3)) for _ in range(alg.dim)]
    assert G.act_on_V(g * h, v) == G.act_on_V(h, G.act_on_V(g, v))
    # isometry up to nothing: the right action preserves q
    assert alg.space.q(G.act_on_V(g, v)) == alg.space.q(v)


@given(algs, seeds)
def test_inverse(alg, seed):
    g = G.random_gspin(alg, random.Random(seed))
    one = g * g.inverse()
    assert one.g == alg.one() and one.nu == 1


def test_not_gspin():
    alg = ALGS["n=1,E=F,p=3"]
    assert G.is_gspin(alg.gen(0)) == (False, None)  # odd
    assert G.is_gspin(alg.gen(0) * alg.gen(2)) == (False, None)  # e1 f1 has norm 0
    with pytest.raises(G.GSpinError):
        G.to_gspin(alg.element())


def test_unipotent_n():
    alg = ALGS["n=2,E=F,p=5"]
    S = alg.space
    x = [0] * S.dim
    x[S.index("u0")] = 2
    x[S.f(2)] = 1
    n = G.build_n(alg, x)
    assert G.is_gspin(n.g) == (True, 1)
    assert G.acts_unipotently(n, 1)
    with pytest.raises(G.GSpinError):
        G.build_n_j(alg, 1, [1] + [0] * (S.dim - 1))


@given(seeds)
def test_basic_function_bi_k_invariant(seed):
    rng = random.Random(seed)
    alg = ALGS["n=1,E=split,p=3"]
    g = G.random_gspin(alg, rng)
    k = G.random_integral_k(alg, rng)
    assert G.phi(g * k) == G.phi(g) == G.phi(k * g)


@given(seeds, st.sampled_from(["n=2,E=F,p=5", "n=2,E=split,p=3"]), st.integers(1, 2))
def test_parabolic_filtration(seed, d, k):
    rng = random.Random(seed)
    alg = ALGS[d]
    pairs = u_pairs(alg.space, k)
    g = G.random_parabolic(alg, k, rng)
    assert G.stabilizes_U(g, k)
    assert filtration_degree(g.g, pairs) <= 0
    u = G.random_parabolic(alg, k, rng, unipotent_only=True)
    assert G.acts_unipotently(u, k)
    assert filtration_degree(u.g - alg.one(), pairs) in (None, -1, -2)


def test_torus_alpha_and_materialize():
    S = parse_descriptor("n=1,E=split,p=3")
    alg = ALGS["n=1,E=split,p=3"]
    t = G.TorusElement((2,), (1, 0))
    g = t.materialize(alg)
    assert G.is_gspin(g.g) == (True, g.nu)
    assert Fr(g.nu) == 3 ** t.nu_valuation(S)
    assert G.torus_alpha(t, [Fr(2)], [Fr(5), Fr(7)], S) == 4 * 5
