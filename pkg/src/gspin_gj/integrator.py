"""p-adic integrals over GSpin(V): U_y measures, Fourier coefficients, beta_T,
the unipotent integral, and the Godement-Jacquet series I(alpha, s).

I(alpha, s) is returned in the normalized variable Y = q^{-(s + 1 - dim V / 2)},
in which every coefficient is rational (see :mod:`gspin_gj.lfun`).
"""
from __future__ import annotations

import random
from math import gcd
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from .arith import TruncSeries, abs_p, as_fraction, is_integral, series_geom, vp
from .clifford import AlgebraMap, CliffordAlgebra, CliffordElement, SpinorModule
from .gspin import (
    GSpinElement,
    TorusElement,
    act_on_V,
    build_n_j,
    delta_B,
    m_i_star,
    pair_m_star,
    random_gspin,
    random_integral_k,
    random_unit,
    torus_alpha,
)
from .lfun import SatakeData, basic_function_coeffs, dV, standard_L, theorem_shift, zeta
from .quadspace import (
    QSpace,
    SpaceError,
    affine_measure_fast,
    affine_measure_int,
    build_space,
    coset_representatives,
    determinant,
    lattice_preimage_measure,
    local_smith,
    preimage_lattice_basis,
)


class IntegrationError(RuntimeError):
    pass


@dataclass
class IntegralResult:
    series: TruncSeries
    cells_visited: int
    stability_certificate: bool
    cells_pruned: int = 0
    notes: list[str] = field(default_factory=list)


# -- V_1 inside V ------------------------------------------------------------------------


def v1_space(S: QSpace) -> QSpace:
    if S.n is None or S.n < 1:
        raise SpaceError("V_1 needs n >= 1")
    return build_space(S.n - 1, S.ekind, S.p)


_EMBED_CACHE: dict = {}


def v1_setup(S: QSpace) -> tuple[CliffordAlgebra, CliffordAlgebra, AlgebraMap]:
    """(Clif(V), Clif(V_1), embedding); V_1 index i sits at index i+1 of V."""
    key = S
    hit = _EMBED_CACHE.get(key)
    if hit is None:
        alg = CliffordAlgebra(S)
        alg1 = CliffordAlgebra(v1_space(S))
        emb = AlgebraMap(alg1, alg, [alg.gen(i + 1) for i in range(alg1.dim)])
        hit = (alg, alg1, emb)
        _EMBED_CACHE[key] = hit
    return hit


def embed_vector(S: QSpace, x1: Sequence) -> list[Fraction]:
    out = [Fraction(0)] * S.dim
    for i, c in enumerate(x1):
        out[i + 1] = as_fraction(c)
    return out


# -- measure of U_y -----------------------------------------------------------------------


def _mult_matrix(alg: CliffordAlgebra, y: CliffordElement, indices: Sequence[int]) -> list[list[Fraction]]:
    """Rows = blades, columns = images x_i y of basis vectors x_i."""
    cols = [alg.gen(i) * y for i in indices]
    masks = sorted({m for c in cols for m in c.terms})
    return [[c.coeff(m) for c in cols] for m in masks]


def measure_Uy(y: GSpinElement) -> Fraction:
    """meas{x in V_1 : x y in Clif(Lambda_1)} by local Smith form (y lives in Clif(V_1))."""
    alg = y.alg
    return lattice_preimage_measure(_mult_matrix(alg, y.g, range(alg.dim)), alg.p)


def measure_Uy_closed(y: GSpinElement) -> Fraction:
    """||y||^{2 - dim V_1} |nu(y)|^{-1}."""
    q = Fraction(y.alg.p)
    k = int(y.g.val())
    return q ** (-k * (2 - y.alg.dim)) / abs_p(y.nu, y.alg.p)


def uy_basis(y: GSpinElement) -> list[tuple[Fraction, ...]]:
    alg = y.alg
    return preimage_lattice_basis(_mult_matrix(alg, y.g, range(alg.dim)), alg.p)


# -- support of Phi on n(x) m(lambda, y) ----------------------------------------------------


def build_m_embedded(S: QSpace, lam, y: GSpinElement) -> GSpinElement:
    alg, _, emb = v1_setup(S)
    lam = as_fraction(lam)
    return GSpinElement(m_i_star(alg, 1, lam) * emb(y.g), lam * y.nu)


def check_support_claim(S: QSpace, x1: Sequence, lam, y: GSpinElement) -> tuple[bool, bool, bool]:
    """(agree, lhs, rhs): lhs = n(x)m(lambda,y) integral; rhs = y, lambda y, x y integral."""
    alg, alg1, _ = v1_setup(S)
    g = build_n_j(alg, 1, embed_vector(S, x1)) * build_m_embedded(S, lam, y).g
    lhs = g.is_integral()
    lam = as_fraction(lam)
    rhs = y.g.is_integral() and (y.g * lam).is_integral() and (alg1.vector(x1) * y.g).is_integral()
    return lhs == rhs, lhs, rhs


# -- Fourier coefficient S_T(Phi) -------------------------------------------------------


def fourier_ST(S: QSpace, lam, y: GSpinElement, T: Sequence) -> Fraction:
    """S_T(Phi)(m(lambda, y)) with the integrand support from check_support_claim.

    The psi-integral over the lattice L_y is meas(L_y) times the indicator that
    psi((T, .)) is trivial on L_y, i.e. (T, b) integral for an O-basis b of L_y.
    """
    S1 = y.alg.space
    lam = as_fraction(lam)
    if not (y.g.is_integral() and (y.g * lam).is_integral()):
        return Fraction(0)
    basis = uy_basis(y)
    if not all(is_integral(S1.pair(T, b), S.p) for b in basis):
        return Fraction(0)
    return measure_Uy(y)


def fourier_ST_expected(S: QSpace, lam, y: GSpinElement, T: Sequence) -> Fraction:
    """|nu(y)|^{-1} 1(val y = 0, lambda integral, T.y in Lambda_1)."""
    lam = as_fraction(lam)
    if int(y.g.val()) != 0 or not is_integral(lam, S.p):
        return Fraction(0)
    if not y.alg.space.in_lattice(act_on_V(y, T)):
        return Fraction(0)
    return 1 / abs_p(y.nu, S.p)


# -- beta_T ---------------------------------------------------------------------------------


def _unit_partner(S1: QSpace, T: Sequence) -> tuple[Fraction, ...]:
    """w in Lambda_1 with (T, w) = 1 (T primitive in a self-dual lattice)."""
    for i in range(S1.dim):
        c = S1.pair(T, S1.basis_vector(i))
        if c and vp(c, S1.p) == 0:
            return S1.basis_vector(i, 1 / c)
    raise IntegrationError("T is not primitive in Lambda_1")


def betaT(S: QSpace, lam, y: GSpinElement, T: Sequence) -> Fraction:
    """int over N_T \\ N of psi((T,x)) beta(T n(x) m(lambda,y)) dx, beta = 1_Lambda.

    The quotient is parametrized by sigma = (T, x) with x = sigma w; T n(x) m
    is affine in sigma, so the integrand is psi(sigma) on an affine lattice.
    """
    alg, _, _ = v1_setup(S)
    S1 = y.alg.space
    m = build_m_embedded(S, lam, y)
    w = embed_vector(S, _unit_partner(S1, T))
    Tv = embed_vector(S, T)

    def image(sigma):
        n = GSpinElement(build_n_j(alg, 1, [sigma * c for c in w]), Fraction(1))
        return act_on_V(n * m, Tv)

    v0 = image(Fraction(0))
    v1 = [a - b for a, b in zip(image(Fraction(1)), v0)]
    v2 = image(Fraction(2))
    if any(c != a + 2 * b for c, a, b in zip(v2, v0, v1)):
        raise IntegrationError("T n(x) m is not affine in the transverse coordinate")
    if not any(v1):
        raise IntegrationError("degenerate transverse coordinate")
    sm = local_smith([[c] for c in v1], S.p, v0)
    if not all(is_integral(c, S.p) for c in sm.residual):
        return Fraction(0)
    k = sm.valuations[0]
    if k > 0:
        return Fraction(0)  # psi is nontrivial on the coset direction
    sigma0 = -sm.shifted[0] / sm.pivots[0] * sm.Q[0][0]
    if not is_integral(sigma0, S.p):
        raise IntegrationError("character value would be a nontrivial root of unity")
    return Fraction(S.p) ** k


def betaT_expected(S: QSpace, lam, y: GSpinElement, T: Sequence) -> Fraction:
    lam = as_fraction(lam)
    if not is_integral(lam, S.p):
        return Fraction(0)
    if not y.alg.space.in_lattice(act_on_V(y, T)):
        return Fraction(0)
    return abs_p(lam, S.p)


def betaT_check(S: QSpace, lam, y: GSpinElement, T: Sequence) -> bool:
    return betaT(S, lam, y, T) == betaT_expected(S, lam, y, T)


# -- samplers for V_1 data -------------------------------------------------------------------


def random_torus(S: QSpace, rng, lo: int = 0, hi: int = 2) -> TorusElement:
    c = tuple(rng.randint(lo, hi) for _ in range(S.n))
    elen = 2 if S.ekind.tag == "split" else 1
    e = tuple(rng.randint(lo, hi) for _ in range(elen)) if rng.random() < 0.5 else (0,) * elen
    return TorusElement(c, e)


def random_y(alg1: CliffordAlgebra, rng, vmin: int = -2, vmax: int = 2, general: float = 0.2) -> GSpinElement:
    """k t k' p^j with k, k' integral, t a nonnegative torus cell; sometimes a vector product."""
    S1 = alg1.space
    p = S1.p
    if rng.random() < general and S1.dim >= 1:
        g = random_gspin(alg1, rng, pairs=rng.randint(1, 2))
    else:
        t = random_torus(S1, rng).materialize(alg1)
        g = random_integral_k(alg1, rng) * t * random_integral_k(alg1, rng)
    j = rng.randint(vmin, vmax)
    pj = Fraction(p) ** j
    return GSpinElement(g.g * pj, g.nu * pj * pj)


def random_scalar(rng, p: int, vmin: int = -2, vmax: int = 2) -> Fraction:
    return Fraction(p) ** rng.randint(vmin, vmax) * random_unit(rng, p)


def random_primitive_T(S1: QSpace, rng) -> tuple[Fraction, ...]:
    """A lattice vector outside p Lambda_1 with q(T) != 0."""
    while True:
        T = tuple(Fraction(rng.randint(-4, 4)) for _ in range(S1.dim))
        if S1.q(T) != 0 and any(c.numerator % S1.p for c in T):
            return T


# -- the Godement-Jacquet series ----------------------------------------------------------------


def _coords(a: CliffordElement) -> dict[int, Fraction]:
    return a.terms


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _ord(n: int, p: int) -> int:
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


class _NIntegrator:
    """NInt(t) = int_N Phi(t n) dn for n = n_1(x_1) n_2(x_2) ... n_n(x_n).

    x_1 is integrated exactly as an affine lattice measure.  The rightmost
    coordinate x_n is summed over L_t / Lambda_n, where L_t = {x : t f_n x
    integral} contains the support (weight argument) and the integrand is
    Lambda_n-periodic (right K-invariance).  Middle coordinates, present only
    when n >= 3, use box grids p^{-A} Lambda_j / p^{B} Lambda_j grown until
    a step of (A, B) -> (A+1, B+1) leaves the value unchanged.
    """

    def __init__(self, alg: CliffordAlgebra, max_depth: int = 4, probe: int = 12, seed: int = 0):
        self.alg = alg
        self.S = alg.space
        self.p = self.S.p
        self.max_depth = max_depth
        self.probe = probe
        self.rng = random.Random(seed)
        S = self.S
        self.fx = {
            j: [alg.gen(S.f(j)) * alg.gen(i) for i in S.sub_indices(j)] for j in range(1, S.n + 1)
        }
        self.sub = {j: S.sub_indices(j) for j in range(1, S.n + 1)}
        self.certified = True
        self.notes: list[str] = []

    def n_elem(self, j: int, x: Sequence[Fraction]) -> CliffordElement:
        out = self.alg.one()
        for c, X in zip(x, self.fx[j]):
            if c:
                out = out + X * c
        return out

    def x1_measure(self, tf1: list[CliffordElement], tR: CliffordElement, R: CliffordElement) -> Fraction:
        cols = [P * R for P in tf1]
        masks = set(tR.terms)
        for c in cols:
            masks.update(c.terms)
        A, b = [], []
        p = self.p
        for m in masks:
            row = [c.coeff(m) for c in cols]
            bm = tR.coeff(m)
            if not any(row):
                if not is_integral(bm, p):
                    return Fraction(0)
                continue
            A.append(row)
            b.append(bm)
        return affine_measure_fast(A, b, p)

    def last_support(self, t: CliffordElement, j: int) -> list[tuple[Fraction, ...]]:
        """Representatives of L_t / Lambda_j, L_t = {x in V_j : t f_j x integral}."""
        alg = self.alg
        cols = [t * X for X in self.fx[j]]
        masks = sorted({m for c in cols for m in c.terms})
        M = [[c.coeff(m) for c in cols] for m in masks]
        basis = preimage_lattice_basis(M, self.p)
        return coset_representatives(basis, self.p), basis

    def __call__(self, t: CliffordElement) -> Fraction:
        n = self.S.n
        if n == 0:
            return Fraction(int(t.is_integral()))
        tf1 = [t * X for X in self.fx[1]]
        if n == 1:
            return self.x1_measure(tf1, t, self.alg.one())
        reps, basis = self.last_support(t, n)
        self._probe_outside(t, tf1, basis)
        total = Fraction(0)
        if n == 2:
            lin = self._linear_x2(t, tf1)
            for x in reps:
                total += lin(x)
            return total
        for x in reps:
            Rn = self.n_elem(n, x)
            total += self._middle(t, tf1, n - 1, Rn)
        return total

    def _linear_x2(self, t, tf1):
        """x_2 -> meas of the x_1 fiber, using that n_2(x_2) is affine in x_2."""
        F2 = self.fx[2]
        cols0 = [P.terms for P in tf1]
        cols1 = [[(P * X).terms for X in F2] for P in tf1]
        b0 = t.terms
        b1 = [(t * X).terms for X in F2]
        masks = set(b0)
        for c in cols0:
            masks.update(c)
        for cl in cols1:
            for c in cl:
                masks.update(c)
        masks = sorted(masks)
        zero = Fraction(0)
        k = len(tf1)
        nc = len(F2)
        p = self.p
        den = 1
        for d in (cols0, b1, [b0]):
            for c in d:
                for v in c.values():
                    den = _lcm(den, v.denominator)
        for cl in cols1:
            for c in cl:
                for v in c.values():
                    den = _lcm(den, v.denominator)
        A0 = [[int(cols0[i].get(m, zero) * den) for i in range(k)] for m in masks]
        A1 = [[[int(cols1[i][c].get(m, zero) * den) for i in range(k)] for m in masks] for c in range(nc)]
        B0 = [int(b0.get(m, zero) * den) for m in masks]
        B1 = [[int(b1[c].get(m, zero) * den) for m in masks] for c in range(nc)]
        s_cell = _ord(den, p)

        def measure(x):
            dx = 1
            for xc in x:
                dx = _lcm(dx, xc.denominator)
            xi = [(c, int(xc * dx)) for c, xc in enumerate(x) if xc]
            A, b = [], []
            ps = p ** (s_cell + _ord(dx, p))
            for r in range(len(masks)):
                row = [dx * a for a in A0[r]]
                br = dx * B0[r]
                for c, xc in xi:
                    a1 = A1[c][r]
                    for i in range(k):
                        if a1[i]:
                            row[i] += xc * a1[i]
                    if B1[c][r]:
                        br += xc * B1[c][r]
                if not any(row):
                    if br % ps:
                        return Fraction(0)
                    continue
                A.append(row)
                b.append(br)
            return affine_measure_int(A, b, p, s_cell + _ord(dx, p))

        return measure

    def _probe_outside(self, t, tf1, basis):
        """Certificate: points of p^{-1} L_t outside L_t contribute zero."""
        if not self.probe:
            return
        n = self.S.n
        p = self.p
        k = len(basis)
        for _ in range(self.probe):
            coeffs = [Fraction(self.rng.randrange(p), p) for _ in range(k)]
            if not any(coeffs):
                continue
            x = [sum((c * b[i] for c, b in zip(coeffs, basis)), Fraction(0)) for i in range(k)]
            val = self._middle(t, tf1, n - 1, self.n_elem(n, x))
            if val:
                self.certified = False
                self.notes.append("support probe found mass outside L_t")

    def _middle(self, t, tf1, j: int, R: CliffordElement) -> Fraction:
        if j == 1:
            return self.x1_measure(tf1, t * R, R)
        best = None
        for depth in range(0, self.max_depth + 1):
            cur = self._grid(t, tf1, j, R, depth, depth)
            nxt = self._grid(t, tf1, j, R, depth + 1, depth + 1)
            if cur == nxt:
                return cur
            best = nxt
        self.certified = False
        self.notes.append(f"grid for x_{j} did not stabilize by depth {self.max_depth}")
        return best

    def _grid(self, t, tf1, j, R, A, B) -> Fraction:
        p = self.p
        k = len(self.sub[j])
        pts = [Fraction(a, p ** A) for a in range(p ** (A + B))]
        w = Fraction(1, p ** (B * k))
        total = Fraction(0)
        for x in product(pts, repeat=k):
            total += self._middle(t, tf1, j - 1, self.n_elem(j, x) * R)
        return total * w


_NINT_CACHE: dict = {}


def torus_cells(S: QSpace, M: int, margin: int | None = None):
    """TorusElements with exponents in [-margin, M] and 0 <= val nu <= M.

    An integral cell has every exponent in [-M, M] (the central part can
    absorb negative m_i exponents), so the default margin is M.
    """
    if margin is None:
        margin = M
    elen = 2 if S.ekind.tag == "split" else 1
    for c in product(range(-margin, M + 1), repeat=S.n):
        for e in product(range(-margin, M + 1), repeat=elen):
            t = TorusElement(tuple(c), tuple(e))
            if 0 <= t.nu_valuation(S) <= M:
                yield t


def nint(alg: CliffordAlgebra, t: TorusElement, tg: CliffordElement | None = None) -> Fraction:
    key = (alg.space, t)
    hit = _NINT_CACHE.get(key)
    if hit is None:
        if tg is None:
            tg = t.materialize(alg).g
        integ = _NIntegrator(alg)
        val = integ(tg)
        hit = (val, integ.certified, tuple(integ.notes))
        _NINT_CACHE[key] = hit
    return hit


def gj_series_direct(sd: SatakeData, S: QSpace, M: int, dim_bound: int = 6, verify_pruned: int = 3, seed: int = 0) -> IntegralResult:
    """I(alpha, s) mod Y^{M+1} by summing over torus cells t of the Iwasawa decomposition.

    Coefficient of a cell: alpha(t) delta_B(t)^{1/2} |nu(t)|^s NInt(t), with
    |nu(t)|^s = q^{(1 - dim V/2) N} Y^N for N = val nu(t).
    """
    d = S.dim
    if d > dim_bound:
        raise IntegrationError(f"dim V = {d} exceeds the bound {dim_bound}")
    alg = CliffordAlgebra(S) if S.n == 0 else v1_setup(S)[0]
    rng = random.Random(seed)
    coeffs = [Fraction(0)] * (M + 1)
    visited = pruned = 0
    certified = True
    notes: list[str] = []
    for t in torus_cells(S, M):
        tg = t.materialize(alg)
        if not tg.g.is_integral():
            pruned += 1
            for _ in range(verify_pruned if S.n else 0):
                x = [Fraction(rng.randint(-9, 9), S.p ** rng.randint(0, 2)) if i in S.sub_indices(1) else 0
                     for i in range(d)]
                if (tg.g * build_n_j(alg, 1, x)).is_integral():
                    raise IntegrationError(f"pruned cell {t} has support")
            continue
        visited += 1
        val, ok, cell_notes = nint(alg, t, tg.g)
        certified = certified and ok
        notes.extend(cell_notes)
        if not val:
            continue
        N = t.nu_valuation(S)
        logd = vp(delta_B(tg), S.p)
        e2 = logd + (2 - d) * N
        if e2 % 2:
            raise IntegrationError("half-integral power of q in a cell coefficient")
        coeffs[N] += torus_alpha(t, sd.a, sd.evals, S) * Fraction(S.p) ** (e2 // 2) * val
    return IntegralResult(TruncSeries(coeffs), visited, certified, pruned, notes)


def _base_case(sd: SatakeData, S: QSpace, M: int) -> TruncSeries:
    """I for V = V_E in Y: Tate sums over E^x."""
    q = S.p
    c = theorem_shift(S.dim)
    if sd.etag == "F":
        # t = z_E(p^k): alpha = b^k, nu = p^{2k}
        return zeta(sd.evals[0], M, k=2, c=c, q=q)
    if sd.etag == "split":
        return series_geom(sd.evals[0], 1, M) * series_geom(sd.evals[1], 1, M)
    return series_geom(sd.evals[0], 2, M)


def gj_series_recursive(sd: SatakeData, S: QSpace, M: int) -> TruncSeries:
    """I_V(alpha) = zeta(mu, .) zeta(omega/mu, .) zeta(omega, 2s-2)^{-1} I_{V_1}(tau, s-1), in Y.

    mu = omega / a_1 and tau = (a_2..a_n; same E data).  Both I_V(s) and
    I_{V_1}(s-1) live in the same normalized variable Y, where the two GL_1
    factors are linear and zeta(omega, 2s-2) = (1 - omega q^{4 - dim V} Y^2)^{-1}.
    """
    if S.n == 0:
        return _base_case(sd, S, M)
    mu = sd.omega / sd.a[0]
    inner = gj_series_recursive(sd.tail(), v1_space(S), M)
    c = theorem_shift(S.dim)
    glue = series_geom(mu, 1, M) * series_geom(sd.omega / mu, 1, M)
    glue = glue * zeta(sd.omega, M, k=2, c=c, j=2, q=S.p).inverse()
    return glue * inner


def theorem1_sides(sd: SatakeData, S: QSpace, I: TruncSeries) -> tuple[TruncSeries, TruncSeries]:
    """(I d^V, L(pi, Std, s + 1 - dim V/2)), both in Y."""
    M = I.M
    c = theorem_shift(S.dim)
    return I * dV(sd, S.dim, M, S.p, c=c), standard_L(sd, S, M, shift=c)


def exact_basic_function_check(sd: SatakeData, S: QSpace, M: int, I: TruncSeries | None = None) -> tuple[bool, TruncSeries, TruncSeries]:
    """L(pi, Std, s+1-dim V/2) = sum_N p_N(q) omega^N X^{2N} I(alpha, s), in Y.

    With X = q^{-s} = q^{1 - dim V/2} Y, X^{2N} = q^{(2 - dim V) N} Y^{2N}.  The
    same identity is also checked in its p' form,
    sum_M p'_M (omega X^2)^M (1 - omega X^2).
    """
    if I is None:
        I = gj_series_recursive(sd, S, M)
    d = S.dim
    q = Fraction(S.p)
    pprime, pcoef = basic_function_coeffs(d, S.p, M)
    w = sd.omega * q ** (2 - d)  # omega X^2 = w Y^2
    P = TruncSeries.monomial(0, 0, M)
    Pp = TruncSeries.monomial(0, 0, M)
    for N in range(M // 2 + 1):
        P = P + TruncSeries.monomial(pcoef[N] * w**N, 2 * N, M)
        Pp = Pp + TruncSeries.monomial(pprime[N] * w**N, 2 * N, M)
    Pp = Pp * (TruncSeries.one(M) - TruncSeries.monomial(w, 2, M))
    L = standard_L(sd, S, M, shift=theorem_shift(d))
    lhs = P * I
    return lhs == L and Pp * I == L, lhs, L


# -- doubling setup, spinor module checks --------------------------------------------------------


class DoublingSetup:
    """W = V + V_0^- for V = U^vee + V_0 + U with U = span(f_1..f_r).

    W is given the adapted basis x-block [f_1..f_r, D(v_1)..D(v_m)], then the
    complement [e_1..e_r, y_1..y_m], where D(v) = (v, v) and
    y_k = (G^{-1} e_k, -G^{-1} e_k)/2 for the Gram matrix G of V_0.  Its Gram
    matrix is hyperbolic and, for p odd and V_0 unimodular, the basis spans
    Lambda(V) + Lambda(V_0^-).  X = span of the x-block is maximal isotropic.
    """

    def __init__(self, S: QSpace, r: int):
        if S.n is None or not 0 <= r <= S.n:
            raise SpaceError("need a quasisplit space with r <= n")
        self.S = S
        self.r = r
        self.v0_idx = S.sub_indices(r) if r else list(range(S.dim))
        m = len(self.v0_idx)
        self.m = m
        G = [[S.gram[i][j] for j in self.v0_idx] for i in self.v0_idx]
        self.G = G
        labels0 = [S.labels[i] for i in self.v0_idx]
        self.V0 = QSpace.from_gram(G, labels0, S.p)
        self.V0m = QSpace.from_gram([[-x for x in row] for row in G], labels0, S.p)
        h = r + m
        gram = [[Fraction(int(abs(i - j) == h)) for j in range(2 * h)] for i in range(2 * h)]
        labels = [f"f{i}" for i in range(1, r + 1)] + [f"D{lab}" for lab in labels0]
        labels += [f"e{i}" for i in range(1, r + 1)] + [f"y{lab}" for lab in labels0]
        self.W = QSpace.from_gram(gram, labels, S.p)
        self.algW = CliffordAlgebra(self.W)
        self.alg = CliffordAlgebra(S)
        self.alg0 = CliffordAlgebra(self.V0)
        self.alg0m = CliffordAlgebra(self.V0m)
        self.spinor = SpinorModule(self.algW, h)
        half = Fraction(1, 2)

        def v0_image(jj, sign):
            v = [Fraction(0)] * (2 * h)
            v[r + jj] = half
            for k in range(m):
                v[h + r + k] += sign * G[k][jj]
            return v

        self.v_images = []
        for i in range(S.dim):
            v = [Fraction(0)] * (2 * h)
            lab = S.labels[i]
            if i in self.v0_idx:
                v = v0_image(self.v0_idx.index(i), 1)
            elif lab.startswith("f"):
                v[int(lab[1:]) - 1] = Fraction(1)
            else:
                v[h + int(lab[1:]) - 1] = Fraction(1)
            self.v_images.append(v)
        self.v0m_images = [v0_image(jj, -1) for jj in range(m)]
        self.iota_V = AlgebraMap(self.alg, self.algW, [self.algW.vector(v) for v in self.v_images])
        self.iota_V0 = AlgebraMap(
            self.alg0, self.algW, [self.algW.vector(self.v_images[i]) for i in self.v0_idx]
        )
        self.iota_V0m = AlgebraMap(self.alg0m, self.algW, [self.algW.vector(v) for v in self.v0m_images])

    def isometry_defects(self) -> list[str]:
        out = []
        W = self.W
        for a in range(self.S.dim):
            for b in range(self.S.dim):
                if W.pair(self.v_images[a], self.v_images[b]) != self.S.gram[a][b]:
                    out.append(f"V pair {a},{b}")
        for a in range(self.m):
            for b in range(self.m):
                if W.pair(self.v0m_images[a], self.v0m_images[b]) != -self.G[a][b]:
                    out.append(f"V0- pair {a},{b}")
                if W.pair(self.v_images[self.v0_idx[a]], self.v0m_images[b]) != 0:
                    out.append(f"cross pair {a},{b}")
        return out

    def phi_X(self, w: CliffordElement) -> bool:
        """Phi_X(1_X w): is the image of w in S_X(W) in the image of Clif(Lambda(W))?"""
        return self.spinor.is_integral_image(w)

    def x_indices(self) -> range:
        return range(self.r + self.m)

    def y_indices(self) -> range:
        h = self.r + self.m
        return range(h, 2 * h)


def pullback_phi_check(setup: DoublingSetup, h: GSpinElement, side: str = "minus") -> tuple[bool, bool, bool]:
    """Phi_X(1_X (1, h)) vs Phi_{Lambda(V_0^-)}(h) (side 'minus'), or (h, 1) vs Phi_{Lambda(V_0)}(h)."""
    emb = setup.iota_V0m if side == "minus" else setup.iota_V0
    lhs = setup.phi_X(emb(h.g))
    rhs = h.g.is_integral()
    return lhs == rhs, lhs, rhs


def random_px(setup: DoublingSetup, rng, length: int = 4) -> GSpinElement:
    """Random word in generators of the stabilizer P_X of X in GSpin(W)."""
    alg = setup.algW
    p = setup.S.p
    xs, ys = list(setup.x_indices()), list(setup.y_indices())
    g = GSpinElement(alg.one(), Fraction(1))
    for _ in range(length):
        kind = rng.choice(["torus", "gl", "siegel", "center"])
        if kind == "torus":
            i = rng.randrange(len(xs))
            t = random_scalar(rng, p)
            h = GSpinElement(pair_m_star(alg, ys[i], xs[i], t), t)
        elif kind == "gl" and len(xs) >= 2:
            i, j = rng.sample(range(len(xs)), 2)
            c = random_scalar(rng, p, -1, 1)
            h = GSpinElement(alg.one() + alg.gen(xs[i]) * alg.gen(ys[j]) * c, Fraction(1))
        elif kind == "siegel" and len(xs) >= 2:
            i, j = rng.sample(range(len(xs)), 2)
            c = random_scalar(rng, p, -1, 1)
            h = GSpinElement(alg.one() + alg.gen(xs[i]) * alg.gen(xs[j]) * c, Fraction(1))
        else:
            t = random_scalar(rng, p, -1, 1)
            h = GSpinElement(alg.scalar(t), t * t)
        g = g * h
    return g


class NotStabilizing(ValueError):
    pass


def eis_section_character(setup: DoublingSetup, pe: GSpinElement) -> tuple[Fraction, Fraction]:
    """(alpha(p), det of the induced action on W/X); raises NotStabilizing if 1_X p is not a multiple of 1_X."""
    red = setup.spinor.reduce(pe.g)
    if any(red[1:]):
        raise NotStabilizing("1_X p is not proportional to 1_X")
    alpha = red[0]
    ys = list(setup.y_indices())
    xs = set(setup.x_indices())
    for i in xs:
        img = act_on_V(pe, setup.W.basis_vector(i))
        if any(img[j] for j in ys):
            raise NotStabilizing("p does not stabilize X")
    mat = []
    for i in ys:
        img = act_on_V(pe, setup.W.basis_vector(i))
        mat.append([img[j] for j in ys])
    return alpha, determinant(mat)


def eis_section_character_check(setup: DoublingSetup, pe: GSpinElement) -> bool:
    alpha, det = eis_section_character(setup, pe)
    return alpha * alpha / pe.nu == 1 / det


def random_y_prime_k(setup: DoublingSetup, alg1: CliffordAlgebra, rng) -> GSpinElement:
    """y = y' k with y' in GSpin(V_0) (p-power scaled) and k integral in GSpin(V_1); returned in Clif(V_1)."""
    S1 = alg1.space
    imgs = [alg1.gen(i - 1) for i in setup.v0_idx]
    emb0 = AlgebraMap(setup.alg0, alg1, imgs)
    yp = random_gspin(setup.alg0, rng, pairs=rng.randint(1, 2))
    j = rng.randint(-1, 1)
    pj = Fraction(S1.p) ** j
    k = random_integral_k(alg1, rng)
    return GSpinElement(emb0(yp.g) * pj * k.g, yp.nu * pj * pj * k.nu)


def chary_check(setup: DoublingSetup, lam, y: GSpinElement, T: Sequence | None = None) -> tuple[bool, str]:
    """1_X m(lambda,y) and 1_X y agree in S_X(W); with T, also
    1(T.y) Phi_X(1_X m(lambda,y)) = 1(y) 1(T.y)."""
    S = setup.S
    _, _, emb = v1_setup(S)
    m = build_m_embedded(S, lam, y)
    wm = setup.iota_V(m.g)
    wy = setup.iota_V(emb(y.g))
    if setup.spinor.reduce(wm) != setup.spinor.reduce(wy):
        return False, "spinor images differ"
    if T is None:
        return True, ""
    ty = y.alg.space.in_lattice(act_on_V(y, T))
    lhs = ty and setup.phi_X(wm)
    rhs = ty and y.g.is_integral()
    if lhs != rhs:
        return False, f"support identity: lhs={lhs} rhs={rhs}"
    return True, ""


__all__ = [
    "DoublingSetup", "IntegralResult", "IntegrationError", "NotStabilizing", "betaT", "betaT_check",
    "betaT_expected", "build_m_embedded", "chary_check", "check_support_claim", "eis_section_character",
    "eis_section_character_check", "exact_basic_function_check", "fourier_ST", "fourier_ST_expected",
    "gj_series_direct", "gj_series_recursive", "measure_Uy", "measure_Uy_closed", "nint",
    "pullback_phi_check", "random_primitive_T", "random_px", "random_scalar", "random_torus", "random_y",
    "random_y_prime_k", "theorem1_sides", "torus_cells", "uy_basis", "v1_setup", "v1_space",
]
