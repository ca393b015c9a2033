"""GSpin(V) inside Clif^+(V): membership, similitude, the right action on V,
named elements (n(x), m(lambda, y), m_i, z, z_E, h_U), the modulus character
of the Borel subgroup and random generators."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .arith import as_fraction, is_integral, vp
from .clifford import (
    CliffordAlgebra,
    CliffordElement,
    bits,
    e_multiply,
    e_norm,
    iota0,
)
from .quadspace import QSpace, determinant


class GSpinError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GSpinElement:
    g: CliffordElement
    nu: Fraction

    @property
    def alg(self) -> CliffordAlgebra:
        return self.g.alg

    def __mul__(self, other: "GSpinElement") -> "GSpinElement":
        return GSpinElement(self.g * other.g, self.nu * other.nu)

    def inverse(self) -> "GSpinElement":
        return GSpinElement(self.g.star() / self.nu, 1 / self.nu)

    def __repr__(self) -> str:
        return f"GSpinElement(nu={self.nu}, g={self.g})"


def similitude(a: CliffordElement) -> Fraction | None:
    """nu with a^* a = nu, or None when a^* a is not a nonzero scalar."""
    n = a.star() * a
    if not n.is_scalar() or not n.scalar_part():
        return None
    return n.scalar_part()


def is_gspin(a: CliffordElement) -> tuple[bool, Fraction | None]:
    if not a.terms or not a.is_even():
        return False, None
    nu = similitude(a)
    if nu is None:
        return False, None
    alg = a.alg
    ast = a.star()
    for i in range(alg.dim):
        if not (ast * alg.gen(i) * a).is_vector():
            return False, None
    return True, nu


def to_gspin(a: CliffordElement) -> GSpinElement:
    ok, nu = is_gspin(a)
    if not ok:
        raise GSpinError(f"not in GSpin: {a}")
    return GSpinElement(a, nu)


def act_on_V(g: GSpinElement | CliffordElement, v: Sequence) -> tuple[Fraction, ...]:
    """v . g = g^{-1} v g, the right action on V."""
    if isinstance(g, CliffordElement):
        g = to_gspin(g)
    alg = g.alg
    w = g.g.star() * alg.vector(v) * g.g
    return tuple(c / g.nu for c in w.vector_coords())


def action_matrix(g: GSpinElement) -> list[list[Fraction]]:
    """Row i holds the image of basis vector i under the right action."""
    S = g.alg.space
    return [list(act_on_V(g, S.basis_vector(i))) for i in range(S.dim)]


# -- named elements ---------------------------------------------------------------------


def m_i(alg: CliffordAlgebra, i: int, t) -> CliffordElement:
    """m_i(t) = t e_i f_i + f_i e_i."""
    S = alg.space
    e, f = alg.gen(S.e(i)), alg.gen(S.f(i))
    return e * f * as_fraction(t) + f * e


def m_i_star(alg: CliffordAlgebra, i: int, t) -> CliffordElement:
    """m_i^*(t) = e_i f_i + t f_i e_i."""
    S = alg.space
    e, f = alg.gen(S.e(i)), alg.gen(S.f(i))
    return e * f + f * e * as_fraction(t)


def pair_m_star(alg: CliffordAlgebra, e_idx: int, f_idx: int, t) -> CliffordElement:
    e, f = alg.gen(e_idx), alg.gen(f_idx)
    return e * f + f * e * as_fraction(t)


def z(alg: CliffordAlgebra, t) -> CliffordElement:
    return alg.scalar(t)


def z_E(alg: CliffordAlgebra, lam: Sequence) -> CliffordElement:
    return iota0(lam, alg, check_n=False)


def build_n_j(alg: CliffordAlgebra, j: int, x: Sequence) -> CliffordElement:
    """n_j(x) = 1 + f_j x for x in V_j."""
    S = alg.space
    allowed = set(S.sub_indices(j))
    if any(c and i not in allowed for i, c in enumerate(x)):
        raise GSpinError(f"x must lie in V_{j}")
    return alg.one() + alg.gen(S.f(j)) * alg.vector(x)


def build_n(alg: CliffordAlgebra, x: Sequence) -> GSpinElement:
    return GSpinElement(build_n_j(alg, 1, x), Fraction(1))


def build_m(lam, y: GSpinElement) -> GSpinElement:
    """m(lambda, y) = m_1^*(lambda) y for y in GSpin(V_1)."""
    lam = as_fraction(lam)
    return GSpinElement(m_i_star(y.alg, 1, lam) * y.g, lam * y.nu)


def build_hU(alg: CliffordAlgebra, k: int, t) -> GSpinElement:
    """h_U(t) for U = span(f_1..f_k): scales U^vee by t, U by 1/t, nu = t^k."""
    g = alg.one()
    for i in range(1, k + 1):
        g = g * m_i_star(alg, i, t)
    return GSpinElement(g, as_fraction(t) ** k)


# -- torus --------------------------------------------------------------------------------


@dataclass(frozen=True)
class TorusElement:
    """prod_i m_i(p^{c_i}) * z_E(lambda), lambda = p-power in each E coordinate.

    ``e`` holds exponents: (k,) for E = F and for unramified E (lambda = p^k),
    (a, b) for split E (lambda = (p^a, p^b)).
    """

    c: tuple[int, ...]
    e: tuple[int, ...]

    def e_value(self, S: QSpace) -> tuple[Fraction, ...]:
        p = Fraction(S.p)
        if S.ekind.tag == "split":
            return (p ** self.e[0], p ** self.e[1])
        if S.ekind.tag == "unram":
            return (p ** self.e[0], Fraction(0))
        return (p ** self.e[0],)

    def nu_valuation(self, S: QSpace) -> int:
        ev = sum(self.e) if S.ekind.tag == "split" else 2 * self.e[0]
        return sum(self.c) + ev

    def materialize(self, alg: CliffordAlgebra) -> GSpinElement:
        S = alg.space
        p = Fraction(S.p)
        lam = self.e_value(S)
        g = z_E(alg, lam)
        for i, ci in enumerate(self.c, start=1):
            g = g * m_i(alg, i, p ** ci)
        return GSpinElement(g, e_norm(lam, S) * p ** sum(self.c))


def lie_n_basis(alg: CliffordAlgebra) -> list[CliffordElement]:
    """f_j v for v in the distinguished basis of V_j, j = 1..n (each is +- a blade)."""
    S = alg.space
    out = []
    for j in range(1, S.n + 1):
        fj = alg.gen(S.f(j))
        for i in S.sub_indices(j):
            out.append(fj * alg.gen(i))
    return out


def ad_matrix(t: GSpinElement) -> list[list[Fraction]]:
    """Matrix of X -> t X t^{-1} on Lie(N) in the basis of :func:`lie_n_basis`."""
    alg = t.alg
    basis = lie_n_basis(alg)
    keys = []
    for X in basis:
        (m, c), = X.terms.items()
        keys.append((m, c))
    pos = {m: k for k, (m, _) in enumerate(keys)}
    tinv = t.inverse().g
    rows = []
    for X in basis:
        Y = t.g * X * tinv
        row = [Fraction(0)] * len(basis)
        for m, c in Y.terms.items():
            if m not in pos:
                raise GSpinError("element does not normalize N")
            k = pos[m]
            row[k] = c / keys[k][1]
        rows.append(row)
    return rows


def delta_B(t: GSpinElement) -> Fraction:
    """Modulus character |det Ad(t)|_{Lie N}| of the Borel subgroup."""
    basis_len = len(lie_n_basis(t.alg))
    if basis_len == 0:
        return Fraction(1)
    d = determinant(ad_matrix(t))
    return Fraction(t.alg.p) ** (-vp(d, t.alg.p))


def delta_P(t: GSpinElement) -> Fraction:
    """|det Ad(t)| on Lie of the unipotent radical of the f_1-line stabilizer."""
    alg = t.alg
    S = alg.space
    f1 = alg.gen(S.f(1))
    tinv = t.inverse().g
    d = Fraction(1)
    for i in S.sub_indices(1):
        X = f1 * alg.gen(i)
        Y = t.g * X * tinv
        (m, c), = X.terms.items()
        d *= Y.coeff(m) / c
    return Fraction(alg.p) ** (-vp(d, alg.p))


# -- random elements ----------------------------------------------------------------------


def _rand_vec(S: QSpace, rng, indices, lo=-3, hi=3):
    while True:
        v = [Fraction(0)] * S.dim
        for i in indices:
            v[i] = Fraction(rng.randint(lo, hi))
        if S.q(v) != 0:
            return v


def random_gspin(alg: CliffordAlgebra, rng, indices=None, pairs: int = 2, lo=-3, hi=3) -> GSpinElement:
    """Product of 2*pairs random anisotropic vectors from span(indices)."""
    S = alg.space
    idx = list(range(S.dim)) if indices is None else list(indices)
    g = alg.one()
    nu = Fraction(1)
    for _ in range(2 * pairs):
        v = _rand_vec(S, rng, idx, lo, hi)
        g = g * alg.vector(v)
        nu *= S.q(v)
    return GSpinElement(g, nu)


def random_unit(rng, p: int, lo: int = -9, hi: int = 9) -> Fraction:
    while True:
        a, b = rng.randint(lo, hi), rng.randint(1, hi)
        if a % p and b % p:
            return Fraction(a, b)


def _random_e_unit(S: QSpace, rng) -> tuple[Fraction, ...]:
    p = S.p
    while True:
        lam = tuple(Fraction(rng.randint(-4, 4)) for _ in S.ve_indices)
        nrm = e_norm(lam, S)
        if nrm and nrm.numerator % p:
            return lam


def random_integral_k(alg: CliffordAlgebra, rng, length: int | None = None) -> GSpinElement:
    """A random word in generators of the lattice stabilizer K (integral, unit similitude)."""
    S = alg.space
    p = S.p
    if length is None:
        length = rng.randint(0, 6)
    g = GSpinElement(alg.one(), Fraction(1))
    for _ in range(length):
        kind = rng.choice(["n", "nbar", "torus", "zE", "vw"])
        if kind in ("n", "nbar") and S.n:
            j = rng.randint(1, S.n)
            x = [Fraction(0)] * S.dim
            for i in S.sub_indices(j):
                x[i] = Fraction(rng.randint(-3, 3))
            gen = alg.gen(S.f(j) if kind == "n" else S.e(j))
            h = GSpinElement(alg.one() + gen * alg.vector(x), Fraction(1))
        elif kind == "torus" and S.n:
            i = rng.randint(1, S.n)
            u = Fraction(random_unit(rng, p).numerator)
            u = u if u % p else Fraction(1)
            maker = m_i if rng.random() < 0.5 else m_i_star
            h = GSpinElement(maker(alg, i, u), u)
        elif kind == "zE":
            lam = _random_e_unit(S, rng)
            h = GSpinElement(z_E(alg, lam), e_norm(lam, S))
        else:
            while True:
                v = _rand_vec(S, rng, range(S.dim))
                w = _rand_vec(S, rng, range(S.dim))
                qq = S.q(v) * S.q(w)
                if qq.numerator % p:
                    break
            h = GSpinElement(alg.vector(v) * alg.vector(w), qq)
        g = g * h
    return g


def stabilizes_U(g: GSpinElement, k: int) -> bool:
    """Does the right action of g preserve U = span(f_1..f_k)?"""
    S = g.alg.space
    allowed = {S.f(i) for i in range(1, k + 1)}
    for i in range(1, k + 1):
        w = act_on_V(g, S.basis_vector(S.f(i)))
        if any(c and j not in allowed for j, c in enumerate(w)):
            return False
    return True


def random_parabolic(alg: CliffordAlgebra, k: int, rng, length: int = 4, unipotent_only: bool = False) -> GSpinElement:
    """Random word in generators of P_U (or N_U) for U = span(f_1..f_k)."""
    S = alg.space
    p = S.p
    v0 = S.sub_indices(k)
    g = GSpinElement(alg.one(), Fraction(1))
    for _ in range(length):
        kinds = ["nu", "gl_unip"] if unipotent_only else ["nu", "gl_unip", "torus", "levi0", "center"]
        kind = rng.choice(kinds)
        if kind == "gl_unip" and k >= 2 and not unipotent_only:
            i, j = rng.sample(range(1, k + 1), 2)
            c = Fraction(rng.randint(-3, 3), rng.choice([1, p]))
            h = GSpinElement(alg.one() + alg.gen(S.e(i)) * alg.gen(S.f(j)) * c, Fraction(1))
        elif kind == "torus":
            i = rng.randint(1, k)
            t = Fraction(p) ** rng.randint(-2, 2) * random_unit(rng, p)
            h = GSpinElement(m_i_star(alg, i, t), t)
        elif kind == "levi0" and len(v0) >= 1:
            h = random_gspin(alg, rng, v0, pairs=1)
        elif kind == "center":
            t = Fraction(p) ** rng.randint(-1, 1) * random_unit(rng, p)
            h = GSpinElement(alg.scalar(t), t * t)
        else:
            i = rng.randint(1, k)
            x = [Fraction(0)] * S.dim
            for idx in v0:
                x[idx] = Fraction(rng.randint(-3, 3), rng.choice([1, p]))
            for l in range(1, k + 1):
                if l != i:
                    x[S.f(l)] = Fraction(rng.randint(-3, 3), rng.choice([1, p]))
            h = GSpinElement(alg.one() + alg.gen(S.f(i)) * alg.vector(x), Fraction(1))
        g = g * h
    return g


def phi(g: GSpinElement | CliffordElement) -> bool:
    """The basic function: indicator of Clif(Lambda)."""
    return (g.g if isinstance(g, GSpinElement) else g).is_integral()


def acts_unipotently(g: GSpinElement, k: int) -> bool:
    """Does g fix U pointwise and act trivially on U^perp/U and V/U^perp?"""
    S = g.alg.space
    fs = {S.f(i) for i in range(1, k + 1)}
    es = {S.e(i) for i in range(1, k + 1)}
    for i in range(S.dim):
        v = S.basis_vector(i)
        w = act_on_V(g, v)
        diff = [a - b for a, b in zip(w, v)]
        if g.nu != 1:
            return False
        if i in fs:
            allowed = set()
        elif i in es:
            allowed = set(range(S.dim)) - es
        else:
            allowed = fs
        if any(c and j not in allowed for j, c in enumerate(diff)):
            return False
    return True


def puv_candidate(alg: CliffordAlgebra, k: int, rng) -> GSpinElement:
    """A mix of parabolic words, vector products in U^perp, and general elements."""
    S = alg.space
    kind = rng.choice(["parabolic", "uperp", "general"])
    if kind == "parabolic":
        return random_parabolic(alg, k, rng)
    if kind == "uperp":
        idx = S.sub_indices(k) + [S.f(i) for i in range(1, k + 1)]
        return random_gspin(alg, rng, idx, pairs=rng.randint(1, 2))
    return random_gspin(alg, rng, pairs=rng.randint(1, 2))


def unipotent_candidate(alg: CliffordAlgebra, k: int, rng) -> GSpinElement:
    """Elements 1 + x: unipotent words, or 1 + c f_i v built from random vectors."""
    S = alg.space
    if rng.random() < 0.5:
        return random_parabolic(alg, k, rng, unipotent_only=True)
    i = rng.randint(1, S.n)
    x = [Fraction(0)] * S.dim
    for j in S.sub_indices(i):
        x[j] = Fraction(rng.randint(-3, 3))
    g = alg.one() + alg.gen(S.f(i)) * alg.vector(x)
    if rng.random() < 0.5:
        g = alg.one() + alg.gen(S.e(i)) * alg.vector(x)
    return GSpinElement(g, Fraction(1))


def torus_alpha(t: TorusElement, a: Sequence, evals: Sequence, S: QSpace) -> Fraction:
    """alpha(t) for an unramified character with alpha(m_i(p)) = a_i and E-part values."""
    val = Fraction(1)
    for ai, ci in zip(a, t.c):
        val *= as_fraction(ai) ** ci
    if S.ekind.tag == "split":
        val *= as_fraction(evals[0]) ** t.e[0] * as_fraction(evals[1]) ** t.e[1]
    else:
        val *= as_fraction(evals[0]) ** t.e[0]
    return val


__all__ = [
    "GSpinElement", "GSpinError", "TorusElement", "act_on_V", "action_matrix", "build_hU", "build_m",
    "build_n", "build_n_j", "delta_B", "delta_P", "is_gspin", "m_i", "m_i_star", "pair_m_star",
    "random_gspin", "random_integral_k", "random_parabolic", "random_unit", "similitude",
    "stabilizes_U", "to_gspin", "phi", "acts_unipotently", "puv_candidate", "unipotent_candidate",
    "torus_alpha", "z", "z_E",
]
