"""Quadratic spaces with a distinguished O-basis, and p-adic lattice measures.

Vectors are coordinate tuples in the distinguished basis.  The lattice spanned
by that basis is self-dual for every space built by :func:`build_space`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from .arith import as_fraction, is_integral, vp

Matrix = list[list[Fraction]]


class SpaceError(ValueError):
    pass


@dataclass(frozen=True)
class EKind:
    """The quadratic etale algebra E: 'F', 'split' or 'unram' (with non-square unit u)."""

    tag: str
    u: int | None = None

    def __post_init__(self):
        if self.tag not in ("F", "split", "unram"):
            raise SpaceError(f"unknown E kind {self.tag!r}")
        if self.tag == "unram" and self.u is None:
            raise SpaceError("unramified E needs a non-square unit u")

    @property
    def dim(self) -> int:
        return 1 if self.tag == "F" else 2

    def describe(self) -> str:
        return f"unram:u={self.u}" if self.tag == "unram" else self.tag


F = EKind("F")
SPLIT = EKind("split")


def unram(u: int) -> EKind:
    return EKind("unram", u)


@dataclass(frozen=True)
class QSpace:
    """A quadratic space (V, q) with Gram matrix of (x, y) = q(x+y) - q(x) - q(y).

    Spaces built by :func:`build_space` are quasisplit, ordered
    e_1..e_n, V_E, f_n..f_1; generic spaces (n is None) come from
    :meth:`from_gram`.
    """

    gram: tuple[tuple[Fraction, ...], ...]
    labels: tuple[str, ...]
    p: int
    n: int | None = None
    ekind: EKind | None = None
    _index: dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(self.labels)})

    @classmethod
    def from_gram(cls, gram: Sequence[Sequence], labels: Sequence[str], p: int) -> "QSpace":
        g = tuple(tuple(as_fraction(x) for x in row) for row in gram)
        d = len(g)
        if any(len(row) != d for row in g) or len(labels) != d:
            raise SpaceError("Gram matrix must be square and match the labels")
        for i in range(d):
            for j in range(d):
                if g[i][j] != g[j][i]:
                    raise SpaceError("Gram matrix must be symmetric")
        return cls(g, tuple(labels), p)

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self._index[label]

    def e(self, i: int) -> int:
        return self.index(f"e{i}")

    def f(self, i: int) -> int:
        return self.index(f"f{i}")

    @property
    def ve_indices(self) -> list[int]:
        return [i for i, lab in enumerate(self.labels) if lab.startswith("u")]

    def sub_indices(self, j: int) -> list[int]:
        """Basis indices of V_j, the complement of the first j hyperbolic pairs."""
        drop = {self.e(i) for i in range(1, j + 1)} | {self.f(i) for i in range(1, j + 1)}
        return [k for k in range(self.dim) if k not in drop]

    def descriptor(self) -> str:
        if self.n is None:
            return f"gram{self.dim},p={self.p}"
        return f"n={self.n},E={self.ekind.describe()},p={self.p}"

    def pair(self, v: Sequence, w: Sequence) -> Fraction:
        g = self.gram
        return sum(
            (as_fraction(v[i]) * g[i][j] * as_fraction(w[j])
             for i in range(self.dim) if v[i] for j in range(self.dim) if w[j] and g[i][j]),
            Fraction(0),
        )

    def q(self, v: Sequence) -> Fraction:
        return self.pair(v, v) / 2

    def basis_vector(self, i: int, c=1) -> tuple[Fraction, ...]:
        v = [Fraction(0)] * self.dim
        v[i] = as_fraction(c)
        return tuple(v)

    def in_lattice(self, v: Sequence) -> bool:
        return all(is_integral(c, self.p) for c in v)

    def negated(self) -> "QSpace":
        return QSpace(
            tuple(tuple(-x for x in row) for row in self.gram), self.labels, self.p, self.n, self.ekind
        )


def _legendre(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % k for k in range(2, int(p**0.5) + 1))


def build_space(n: int, ekind: EKind, p: int) -> QSpace:
    """V = span(e_1..e_n) + V_E + span(f_n..f_1), (e_i, f_j) = delta_ij."""
    if not _is_prime(p):
        raise SpaceError(f"{p} is not prime")
    if p == 2:
        raise SpaceError("residue characteristic 2 is not supported")
    if n < 0:
        raise SpaceError("n must be >= 0")
    if ekind.tag == "F":
        ve = [[Fraction(2)]]
    elif ekind.tag == "split":
        ve = [[Fraction(0), Fraction(1)], [Fraction(1), Fraction(0)]]
    else:
        u = ekind.u
        if u % p == 0:
            raise SpaceError("u must be a p-adic unit (ramified E is not supported)")
        if _legendre(u, p) != -1:
            raise SpaceError(f"u={u} is a square mod {p}; E would be split, not a field")
        ve = [[Fraction(2), Fraction(0)], [Fraction(0), Fraction(-2 * u)]]
    k = len(ve)
    d = 2 * n + k
    g = [[Fraction(0)] * d for _ in range(d)]
    for i in range(n):
        g[i][d - 1 - i] = g[d - 1 - i][i] = Fraction(1)
    for a in range(k):
        for b in range(k):
            g[n + a][n + b] = ve[a][b]
    labels = [f"e{i}" for i in range(1, n + 1)]
    labels += [f"u{a}" for a in range(k)]
    labels += [f"f{i}" for i in range(n, 0, -1)]
    return QSpace(tuple(tuple(r) for r in g), tuple(labels), p, n, ekind)


_DESC = re.compile(r"^\s*n=(\d+)\s*,\s*E=(F|split|unram:u=-?\d+)\s*,\s*p=(\d+)\s*$")


def parse_descriptor(desc: str) -> QSpace:
    """Parse 'n=<int>,E=<F|split|unram:u=<int>>,p=<prime>'."""
    m = _DESC.match(desc)
    if not m:
        raise SpaceError(f"bad space descriptor {desc!r}")
    n, e, p = int(m.group(1)), m.group(2), int(m.group(3))
    if e.startswith("unram"):
        ek = unram(int(e.split("=")[1]))
    else:
        ek = EKind(e)
    return build_space(n, ek, p)


def default_nonsquare(p: int) -> int:
    return next(u for u in range(2, p) if _legendre(u, p) == -1)


def dual_membership(v: Sequence, S: QSpace) -> bool:
    """v is in the dual lattice iff gram * v is integral."""
    for row in S.gram:
        s = sum((a * as_fraction(b) for a, b in zip(row, v) if a and b), Fraction(0))
        if not is_integral(s, S.p):
            return False
    return True


# --- local Smith normal form ---------------------------------------------------------


@dataclass
class LocalSmith:
    """P A Q = diag(pivots) with P, Q in GL(Z_(p)); only valuations of pivots matter."""

    pivots: list[Fraction]
    Q: Matrix
    residual: list[Fraction]  # P b restricted to the rows below the rank
    shifted: list[Fraction]   # (P b)_r for r < rank
    p: int

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def valuations(self) -> list[int]:
        return [vp(x, self.p) for x in self.pivots]


def local_smith(A: Sequence[Sequence], p: int, b: Sequence | None = None) -> LocalSmith:
    M = [[as_fraction(x) for x in row] for row in A]
    m = len(M)
    k = len(M[0]) if m else 0
    bb = [as_fraction(x) for x in b] if b is not None else [Fraction(0)] * m
    Q = [[Fraction(int(i == j)) for j in range(k)] for i in range(k)]
    pivots: list[Fraction] = []
    r = 0
    while r < min(m, k):
        best = None
        for i in range(r, m):
            row = M[i]
            for j in range(r, k):
                x = row[j]
                if x:
                    v = vp(x, p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
        if best is None:
            break
        _, i, j = best
        if i != r:
            M[i], M[r] = M[r], M[i]
            bb[i], bb[r] = bb[r], bb[i]
        if j != r:
            for row in M:
                row[j], row[r] = row[r], row[j]
            for row in Q:
                row[j], row[r] = row[r], row[j]
        piv = M[r][r]
        prow = M[r]
        for i in range(r + 1, m):
            f = M[i][r]
            if f:
                f = f / piv
                row = M[i]
                for jj in range(r, k):
                    if prow[jj]:
                        row[jj] -= f * prow[jj]
                bb[i] -= f * bb[r]
        for jj in range(r + 1, k):
            f = prow[jj]
            if f:
                f = f / piv
                prow[jj] = Fraction(0)
                for row in Q:
                    if row[r]:
                        row[jj] -= f * row[r]
        pivots.append(piv)
        r += 1
    return LocalSmith(pivots, Q, bb[r:], bb[:r], p)


def _columns(vectors: Sequence[Sequence]) -> Matrix:
    """Matrix whose columns are the given vectors."""
    if not vectors:
        return []
    return [[as_fraction(v[i]) for v in vectors] for i in range(len(vectors[0]))]


def lattice_preimage_measure(M: Sequence[Sequence], p: int) -> Fraction:
    """meas{x in F^k : M x integral}, normalized so O^k has measure 1.

    Equals p^(sum of elementary-divisor valuations) = |det|^(-1) on the
    column space.
    """
    sm = local_smith(M, p)
    k = len(M[0]) if M else 0
    if sm.rank < k:
        raise SpaceError("matrix has a kernel; preimage has infinite measure")
    return Fraction(p) ** sum(sm.valuations)


def affine_preimage_measure(A: Sequence[Sequence], b: Sequence, p: int) -> Fraction:
    """meas{x : A x + b integral}; zero when the congruence has no solution."""
    sm = local_smith(A, p, b)
    k = len(A[0]) if A else 0
    if sm.rank < k:
        raise SpaceError("matrix has a kernel; preimage has infinite measure")
    if not all(is_integral(c, p) for c in sm.residual):
        return Fraction(0)
    return Fraction(p) ** sum(sm.valuations)


def _ord(n: int, p: int) -> int:
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def affine_measure_fast(A: Sequence[Sequence], b: Sequence, p: int) -> Fraction:
    """Same value as :func:`affine_preimage_measure`, by integer elimination.

    Clearing denominators by D = p^s u turns the condition into
    A'x + b' in p^s O with integer A', b'.  Elimination then multiplies rows
    and columns only by p-adic units, so valuations of pivots are exact.
    """
    den = 1
    for row in A:
        for x in row:
            den = den * x.denominator // _gcd(den, x.denominator)
    for x in b:
        den = den * x.denominator // _gcd(den, x.denominator)
    M = [[int(x * den) for x in row] for row in A]
    bb = [int(x * den) for x in b]
    return affine_measure_int(M, bb, p, _ord(den, p))


def affine_measure_int(M: list[list[int]], bb: list[int], p: int, s: int) -> Fraction:
    """meas{x : M x + bb in p^s O} for integer M, bb (M and bb are consumed)."""
    m = len(M)
    k = len(M[0]) if m else 0
    total = 0
    for r in range(k):
        best = None
        for i in range(r, m):
            row = M[i]
            for j in range(r, k):
                x = row[j]
                if x:
                    v = _ord(x, p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            raise SpaceError("matrix has a kernel; preimage has infinite measure")
        v, i, j = best
        if i != r:
            M[i], M[r] = M[r], M[i]
            bb[i], bb[r] = bb[r], bb[i]
        if j != r:
            for row in M:
                row[j], row[r] = row[r], row[j]
        pv = p**v
        prow = M[r]
        u = prow[r] // pv
        for i in range(r + 1, m):
            f = M[i][r]
            if f:
                a = f // pv
                row = M[i]
                for jj in range(r, k):
                    row[jj] = u * row[jj] - a * prow[jj]
                bb[i] = u * bb[i] - a * bb[r]
        total += v
    ps = p**s
    if any(x % ps for x in bb[k:]):
        return Fraction(0)
    return Fraction(p) ** (total - k * s)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def preimage_lattice_basis(M: Sequence[Sequence], p: int) -> list[tuple[Fraction, ...]]:
    """An O-basis of {x : M x integral} (requires trivial kernel)."""
    sm = local_smith(M, p)
    k = len(sm.Q)
    if sm.rank < k:
        raise SpaceError("matrix has a kernel")
    return [tuple(sm.Q[i][r] / sm.pivots[r] for i in range(k)) for r in range(k)]


def coset_representatives(basis: Sequence[Sequence], p: int) -> list[tuple[Fraction, ...]]:
    """Representatives of L / O^k for a lattice L = span_O(basis) containing O^k."""
    # Re-diagonalize: L = Q' diag(p^-a_i) O^k with Q' in GL(O).
    B = _columns(basis)
    k = len(B)
    inv = _inverse(B)
    sm = local_smith(inv, p)
    exps = sm.valuations  # L = {x : inv x integral}
    if any(a < 0 for a in exps):
        raise SpaceError("lattice does not contain O^k")
    ranges = [[Fraction(j, p**a) for j in range(p**a)] for a in exps]
    reps = []
    for ys in product(*ranges):
        x = tuple(
            sum((sm.Q[i][r] * ys[r] / (sm.pivots[r] / Fraction(p) ** exps[r]) for r in range(k)), Fraction(0))
            for i in range(k)
        )
        reps.append(x)
    return reps


def _inverse(A: Matrix) -> Matrix:
    n = len(A)
    M = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            raise SpaceError("singular matrix")
        M[c], M[piv] = M[piv], M[c]
        pv = M[c][c]
        M[c] = [x / pv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return [row[n:] for row in M]


def determinant(A: Sequence[Sequence]) -> Fraction:
    M = [[as_fraction(x) for x in row] for row in A]
    n = len(M)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        pv = M[c][c]
        det *= pv
        for r in range(c + 1, n):
            if M[r][c]:
                f = M[r][c] / pv
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return det
