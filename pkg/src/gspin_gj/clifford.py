"""Clifford algebras Clif(V, q) over Q with blade-bitmask storage.

A blade is a product v_{i1} v_{i2} ... v_{ik} of distinguished basis vectors
with i1 < i2 < ... < ik, stored as the bitmask sum(1 << i).  Products are
normalized with v_a v_b = -v_b v_a + (v_a, v_b) and v_a v_a = q(v_a), so the
Gram matrix need not be diagonal.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .arith import PadicVal, as_fraction, is_integral, val_p
from .quadspace import QSpace


class CliffordError(ValueError):
    pass


def bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


class CliffordAlgebra:
    """Multiplication tables for Clif(S) of one quadratic space, built lazily."""

    def __init__(self, space: QSpace):
        self.space = space
        self.dim = space.dim
        self.p = space.p
        g = space.gram
        self._pair = [[g[i][j] for j in range(self.dim)] for i in range(self.dim)]
        self._q = [g[i][i] / 2 for i in range(self.dim)]
        self._gen_cache: dict[tuple[int, int], tuple[tuple[int, Fraction], ...]] = {}
        self._blade_cache: dict[tuple[int, int], tuple[tuple[int, Fraction], ...]] = {}
        self._rev_cache: dict[int, tuple[tuple[int, Fraction], ...]] = {}

    # -- kernels ----------------------------------------------------------------------

    def _times_generator(self, word: int, g: int) -> tuple[tuple[int, Fraction], ...]:
        """(blade word) * v_g as a normalized sum of blades."""
        key = (word, g)
        hit = self._gen_cache.get(key)
        if hit is not None:
            return hit
        if word == 0:
            res = ((1 << g, Fraction(1)),)
        else:
            last = word.bit_length() - 1
            if last < g:
                res = ((word | (1 << g), Fraction(1)),)
            elif last == g:
                q = self._q[g]
                res = ((word ^ (1 << g), q),) if q else ()
            else:
                rest = word ^ (1 << last)
                acc: dict[int, Fraction] = {}
                # rest * v_last * v_g = -(rest * v_g) * v_last + (v_last, v_g) rest
                for m, c in self._times_generator(rest, g):
                    mm = m | (1 << last)
                    acc[mm] = acc.get(mm, 0) - c
                b = self._pair[last][g]
                if b:
                    acc[rest] = acc.get(rest, 0) + b
                res = tuple((m, c) for m, c in acc.items() if c)
        self._gen_cache[key] = res
        return res

    def blade_product(self, a: int, b: int) -> tuple[tuple[int, Fraction], ...]:
        key = (a, b)
        hit = self._blade_cache.get(key)
        if hit is not None:
            return hit
        cur: dict[int, Fraction] = {a: Fraction(1)}
        for g in bits(b):
            nxt: dict[int, Fraction] = {}
            for m, c in cur.items():
                for mm, cc in self._times_generator(m, g):
                    nxt[mm] = nxt.get(mm, 0) + c * cc
            cur = {m: c for m, c in nxt.items() if c}
        res = tuple(cur.items())
        self._blade_cache[key] = res
        return res

    def blade_reverse(self, a: int) -> tuple[tuple[int, Fraction], ...]:
        """The reversed product v_ik ... v_i1, renormalized."""
        hit = self._rev_cache.get(a)
        if hit is not None:
            return hit
        cur: dict[int, Fraction] = {0: Fraction(1)}
        for g in reversed(bits(a)):
            nxt: dict[int, Fraction] = {}
            for m, c in cur.items():
                for mm, cc in self._times_generator(m, g):
                    nxt[mm] = nxt.get(mm, 0) + c * cc
            cur = {m: c for m, c in nxt.items() if c}
        res = tuple(cur.items())
        self._rev_cache[a] = res
        return res

    # -- constructors -----------------------------------------------------------------

    def element(self, terms: Mapping[int, object] | None = None) -> "CliffordElement":
        return CliffordElement(self, terms or {})

    def scalar(self, c) -> "CliffordElement":
        c = as_fraction(c)
        return CliffordElement(self, {0: c} if c else {})

    def one(self) -> "CliffordElement":
        return self.scalar(1)

    def gen(self, i: int) -> "CliffordElement":
        return CliffordElement(self, {1 << i: Fraction(1)})

    def vector(self, coords: Sequence) -> "CliffordElement":
        if len(coords) != self.dim:
            raise CliffordError("vector has the wrong length")
        return CliffordElement(self, {1 << i: as_fraction(c) for i, c in enumerate(coords) if c})

    def basis_blades(self) -> list[int]:
        return list(range(1 << self.dim))

    def label_of(self, mask: int) -> str:
        if mask == 0:
            return "1"
        return "^".join(self.space.labels[i] for i in bits(mask))

    def parse(self, text: str) -> "CliffordElement":
        """Parse 'c1 * e1^f1 + c2 * u0 - 3/2' (coefficients exact rationals)."""
        s = text.replace(" ", "")
        if not s:
            return self.element()
        out = self.element()
        for sign, body in re.findall(r"([+-]?)([^+-]+)", s):
            if "*" in body:
                coeff, blade = body.split("*", 1)
            elif re.fullmatch(r"\d+(/\d+)?", body):
                coeff, blade = body, "1"
            else:
                coeff, blade = "1", body
            c = Fraction(coeff) * (-1 if sign == "-" else 1)
            term = self.scalar(c)
            if blade != "1":
                for lab in blade.split("^"):
                    term = term * self.gen(self.space.index(lab))
            out = out + term
        return out


class CliffordElement:
    """Sparse exact element of a Clifford algebra; zero coefficients are never stored."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: CliffordAlgebra, terms: Mapping[int, object]):
        self.alg = alg
        self.terms: dict[int, Fraction] = {}
        for m, c in terms.items():
            c = as_fraction(c)
            if c:
                self.terms[m] = c

    @classmethod
    def _raw(cls, alg: CliffordAlgebra, terms: dict[int, Fraction]) -> "CliffordElement":
        obj = cls.__new__(cls)
        obj.alg = alg
        obj.terms = terms
        return obj

    def _check(self, other: "CliffordElement"):
        if other.alg is not self.alg:
            raise CliffordError("elements live in different Clifford algebras")

    def __add__(self, other) -> "CliffordElement":
        if not isinstance(other, CliffordElement):
            other = self.alg.scalar(other)
        self._check(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            v = t.get(m, 0) + c
            if v:
                t[m] = v
            else:
                t.pop(m, None)
        return CliffordElement._raw(self.alg, t)

    __radd__ = __add__

    def __neg__(self) -> "CliffordElement":
        return CliffordElement._raw(self.alg, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "CliffordElement":
        if not isinstance(other, CliffordElement):
            other = self.alg.scalar(other)
        return self + (-other)

    def __rsub__(self, other) -> "CliffordElement":
        return (-self) + other

    def __mul__(self, other) -> "CliffordElement":
        if not isinstance(other, CliffordElement):
            c = as_fraction(other)
            if not c:
                return CliffordElement._raw(self.alg, {})
            return CliffordElement._raw(self.alg, {m: v * c for m, v in self.terms.items()})
        self._check(other)
        alg = self.alg
        acc: dict[int, Fraction] = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                cab = ca * cb
                for m, c in alg.blade_product(a, b):
                    acc[m] = acc.get(m, 0) + cab * c
        return CliffordElement._raw(alg, {m: c for m, c in acc.items() if c})

    def __rmul__(self, other) -> "CliffordElement":
        return self * other

    def __truediv__(self, c) -> "CliffordElement":
        return self * (1 / as_fraction(c))

    def __eq__(self, other) -> bool:
        if not isinstance(other, CliffordElement):
            if self.is_scalar():
                return self.scalar_part() == as_fraction(other)
            return False
        return self.alg is other.alg and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def star(self) -> "CliffordElement":
        """The reversal anti-involution (v_1...v_r)^* = v_r...v_1."""
        acc: dict[int, Fraction] = {}
        for a, ca in self.terms.items():
            for m, c in self.alg.blade_reverse(a):
                acc[m] = acc.get(m, 0) + ca * c
        return CliffordElement._raw(self.alg, {m: c for m, c in acc.items() if c})

    # -- inspection --------------------------------------------------------------------

    def coeff(self, mask: int) -> Fraction:
        return self.terms.get(mask, Fraction(0))

    def is_scalar(self) -> bool:
        return all(m == 0 for m in self.terms)

    def scalar_part(self) -> Fraction:
        return self.terms.get(0, Fraction(0))

    def is_vector(self) -> bool:
        return all(popcount(m) == 1 for m in self.terms)

    def vector_coords(self) -> tuple[Fraction, ...]:
        if not self.is_vector():
            raise CliffordError("element is not a vector")
        return tuple(self.terms.get(1 << i, Fraction(0)) for i in range(self.alg.dim))

    def parity(self) -> int | None:
        """0 for even, 1 for odd, None for mixed (zero counts as even)."""
        ps = {popcount(m) & 1 for m in self.terms}
        if not ps:
            return 0
        return ps.pop() if len(ps) == 1 else None

    def is_even(self) -> bool:
        return self.parity() == 0

    def val(self) -> PadicVal:
        """Minimum p-adic valuation of the blade coefficients."""
        if not self.terms:
            return PadicVal.inf()
        return min(val_p(c, self.alg.p) for c in self.terms.values())

    def is_integral(self) -> bool:
        p = self.alg.p
        return all(is_integral(c, p) for c in self.terms.values())

    def __repr__(self) -> str:
        return format_element(self)


def format_element(a: CliffordElement) -> str:
    if not a.terms:
        return "0"
    parts = []
    for m in sorted(a.terms, key=lambda m: (popcount(m), m)):
        c = a.terms[m]
        parts.append(f"{c} * {a.alg.label_of(m)}" if m else str(c))
    return " + ".join(parts)


def val_clif(a: CliffordElement) -> PadicVal:
    return a.val()


def mul(a: CliffordElement, b: CliffordElement) -> CliffordElement:
    return a * b


def star(a: CliffordElement) -> CliffordElement:
    return a.star()


class AlgebraMap:
    """Algebra homomorphism Clif(S) -> Clif(T) induced by an isometric map on generators."""

    def __init__(self, source: CliffordAlgebra, target: CliffordAlgebra, images: Sequence[CliffordElement]):
        if len(images) != source.dim:
            raise CliffordError("need one image per generator")
        self.source = source
        self.target = target
        self.images = list(images)
        self._cache: dict[int, CliffordElement] = {}

    def _blade(self, mask: int) -> CliffordElement:
        hit = self._cache.get(mask)
        if hit is None:
            hit = self.target.one()
            for i in bits(mask):
                hit = hit * self.images[i]
            self._cache[mask] = hit
        return hit

    def __call__(self, a: CliffordElement) -> CliffordElement:
        out = self.target.element()
        for m, c in a.terms.items():
            out = out + self._blade(m) * c
        return out


# -- E and V_E -----------------------------------------------------------------------


def e_multiply(x: Sequence, y: Sequence, S: QSpace) -> tuple[Fraction, ...]:
    """Multiplication in E, with E coordinates matching the V_E basis."""
    tag = S.ekind.tag
    x = [as_fraction(a) for a in x]
    y = [as_fraction(a) for a in y]
    if tag == "F":
        return (x[0] * y[0],)
    if tag == "split":
        return (x[0] * y[0], x[1] * y[1])
    u = S.ekind.u
    return (x[0] * y[0] + u * x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def e_norm(x: Sequence, S: QSpace) -> Fraction:
    tag = S.ekind.tag
    x = [as_fraction(a) for a in x]
    if tag == "F":
        return x[0] ** 2
    if tag == "split":
        return x[0] * x[1]
    return x[0] ** 2 - S.ekind.u * x[1] ** 2


def e_one(S: QSpace) -> tuple[Fraction, ...]:
    return (Fraction(1),) if S.ekind.tag == "F" else ((Fraction(1), Fraction(1)) if S.ekind.tag == "split" else (Fraction(1), Fraction(0)))


def ve_vector(alg: CliffordAlgebra, lam: Sequence) -> CliffordElement:
    S = alg.space
    idx = S.ve_indices
    if len(lam) != len(idx):
        raise CliffordError("E element has the wrong number of coordinates")
    return alg.element({1 << i: c for i, c in zip(idx, lam)})


def iota0(lam: Sequence, alg: CliffordAlgebra, check_n: bool = True) -> CliffordElement:
    """The embedding E -> Clif^+(V_E), lambda -> iota1(1) iota1(lambda).

    For n > 0 the image is taken inside Clif(V) through V_E; pass
    ``check_n=False`` to allow that.
    """
    S = alg.space
    if S.ekind is None:
        raise CliffordError("iota0 needs a quasisplit space")
    if check_n and S.n != 0:
        raise CliffordError("iota0 is defined on V_E (n must be 0)")
    return ve_vector(alg, e_one(S)) * ve_vector(alg, lam)


# -- filtration ------------------------------------------------------------------------


def blade_weight(mask: int, pairs: Sequence[tuple[int, int]]) -> int:
    """#(dual indices e) - #(isotropic indices f) over the (e, f) pairs spanning U^vee, U."""
    w = 0
    for e, f in pairs:
        if mask >> e & 1:
            w += 1
        if mask >> f & 1:
            w -= 1
    return w


def u_pairs(S: QSpace, k: int) -> list[tuple[int, int]]:
    """(e_i, f_i) index pairs for U = span(f_1..f_k)."""
    return [(S.e(i), S.f(i)) for i in range(1, k + 1)]


def filtration_degree(a: CliffordElement, pairs: Sequence[tuple[int, int]]) -> int | None:
    """Smallest k with a in W^U_k Clif(V); None for a = 0 (it lies in every piece)."""
    if not a.terms:
        return None
    return max(blade_weight(m, pairs) for m in a.terms)


# -- spinor module ----------------------------------------------------------------------


class SpinorModule:
    """S_X(W) = Clif(W) / X Clif(W) for X spanned by the first r generators.

    The first r basis vectors must be isotropic and mutually orthogonal.  With
    them ordered first, X Clif(W) is exactly the span of blades that contain
    one of them, so the quotient has the X-free blades as a basis.
    """

    def __init__(self, alg: CliffordAlgebra, r: int):
        g = alg.space.gram
        for i in range(r):
            for j in range(r):
                if g[i][j]:
                    raise CliffordError("X generators must be isotropic and mutually orthogonal")
        self.alg = alg
        self.r = r
        self.xmask = (1 << r) - 1
        self.basis = [m for m in range(1 << alg.dim) if not m & self.xmask]
        self._pos = {m: i for i, m in enumerate(self.basis)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def reduce(self, a: CliffordElement) -> tuple[Fraction, ...]:
        """Coordinates of the image of a; the vacuum 1_X is coordinate 0."""
        out = [Fraction(0)] * len(self.basis)
        for m, c in a.terms.items():
            if not m & self.xmask:
                out[self._pos[m]] = c
        return tuple(out)

    def is_integral_image(self, a: CliffordElement) -> bool:
        """Membership of the image in the image of Clif(Lambda(W)) (the X-free integral blades)."""
        p = self.alg.p
        return all(is_integral(c, p) for m, c in a.terms.items() if not m & self.xmask)


def spinor_reduce(a: CliffordElement, S: SpinorModule) -> tuple[Fraction, ...]:
    return S.reduce(a)


def random_vector(alg: CliffordAlgebra, rng, lo: int = -3, hi: int = 3, indices: Iterable[int] | None = None):
    idx = list(range(alg.dim)) if indices is None else list(indices)
    coords = [0] * alg.dim
    for i in idx:
        coords[i] = rng.randint(lo, hi)
    return alg.vector(coords)


def random_element(alg: CliffordAlgebra, rng, nterms: int = 4, lo: int = -3, hi: int = 3, den: int = 1, parity=None):
    terms = {}
    for _ in range(nterms):
        m = rng.randrange(1 << alg.dim)
        if parity is not None and popcount(m) % 2 != parity:
            m ^= 1
        terms[m] = Fraction(rng.randint(lo, hi), rng.randint(1, den))
    return alg.element(terms)
