"""Satake data, abelian zeta factors, the standard L-function, d^V and the
basic-function coefficient polynomials.

Series here are formal in a variable X_c = q^{-(s+c)} for a half-integer
``c``.  Moving between X_c and X_{c'} multiplies X by q^{c-c'}, which stays
rational whenever c - c' is an integer; every identity we check is stated in
a variable where that holds.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .arith import TruncSeries, as_fraction, series_geom, series_product
from .quadspace import QSpace


class SatakeError(ValueError):
    pass


@dataclass(frozen=True)
class SatakeData:
    """a_i = alpha(m_i(p)); evals = (b,) for E = F or unramified E, (b1, b2) for split E."""

    a: tuple[Fraction, ...]
    evals: tuple[Fraction, ...]
    etag: str = "F"

    def __post_init__(self):
        want = 2 if self.etag == "split" else 1
        if len(self.evals) != want:
            raise SatakeError(f"E={self.etag} needs {want} E-part value(s)")
        if any(x == 0 for x in self.a + self.evals):
            raise SatakeError("Satake values must be nonzero")

    @classmethod
    def make(cls, a: Sequence, evals: Sequence, etag: str = "F") -> "SatakeData":
        return cls(tuple(as_fraction(x) for x in a), tuple(as_fraction(x) for x in evals), etag)

    @property
    def omega(self) -> Fraction:
        """Central character on p: alpha(z(p))."""
        if self.etag == "split":
            return self.evals[0] * self.evals[1]
        return self.evals[0]

    @property
    def a_prime(self) -> tuple[Fraction, ...]:
        return tuple(self.omega / x for x in self.a)

    def tail(self) -> "SatakeData":
        """(a_2..a_n; same E data): the parameters seen by V_1."""
        return SatakeData(self.a[1:], self.evals, self.etag)

    def as_strings(self) -> list[str]:
        return [str(x) for x in self.a] + ["E=" + ",".join(str(x) for x in self.evals)]


def _etag(S: QSpace) -> str:
    return S.ekind.tag


def random_satake(S: QSpace, rng) -> SatakeData:
    """Seeded small nonzero rationals in [-9, 9]."""

    def draw():
        while True:
            x = Fraction(rng.randint(-9, 9), rng.randint(1, 3))
            if x:
                return x

    k = 2 if _etag(S) == "split" else 1
    return SatakeData(tuple(draw() for _ in range(S.n)), tuple(draw() for _ in range(k)), _etag(S))


_SAT = re.compile(r"^\s*(?P<a>[^;E]*?)\s*;?\s*E\s*=\s*(?P<e>.+?)\s*$")


def parse_satake(text: str, S: QSpace) -> SatakeData:
    """Parse 'a1,a2,..;E=b' (or 'E=b1,b2' for split E)."""
    m = _SAT.match(text)
    if not m:
        raise SatakeError(f"bad Satake string {text!r}")
    a_part = m.group("a").strip().rstrip(";").strip()
    try:
        a = [Fraction(x.strip()) for x in a_part.split(",")] if a_part else []
        e = [Fraction(x.strip()) for x in m.group("e").split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise SatakeError(f"bad Satake string {text!r}: {exc}") from None
    if len(a) != S.n:
        raise SatakeError(f"space has n={S.n} but {len(a)} torus values were given")
    return SatakeData.make(a, e, _etag(S))


def _check_half(c) -> Fraction:
    c = as_fraction(c)
    if (2 * c).denominator != 1:
        raise SatakeError("shifts must be half-integers")
    return c


def rebase(series: TruncSeries, c_from, c_to, q: int) -> TruncSeries:
    """Re-express a series in X_{c_from} as a series in X_{c_to}."""
    d = as_fraction(c_from) - as_fraction(c_to)
    if d.denominator != 1:
        raise SatakeError("rebase needs an integer difference of shifts")
    # X_from = q^{-(s+c_from)} = q^{c_to - c_from} X_to
    return series.scale_var(Fraction(q) ** int(-d))


def zeta(a, M: int, k: int = 1, c=0, j: int = 0, q: int | None = None) -> TruncSeries:
    """zeta(a, k s - j) = (1 - a q^{-(ks - j)})^{-1} written in X_c.

    q^{-ks} = q^{kc} X_c^k, so the factor is (1 - a q^{kc + j} X_c^k)^{-1}.
    """
    c = _check_half(c)
    e = k * c + j
    if e.denominator != 1:
        raise SatakeError("zeta factor is not rational in this variable")
    if e and q is None:
        raise SatakeError("q is needed for shifted zeta factors")
    coeff = as_fraction(a) * (Fraction(q) ** int(e) if e else 1)
    return series_geom(coeff, k, M)


def standard_L(sd: SatakeData, S: QSpace, M: int, shift=0) -> TruncSeries:
    """L(pi, Std, s + shift) as a series in X_shift = q^{-(s+shift)}.

    In its own variable the shifted L-function has the unshifted coefficients,
    so ``shift`` only records which variable the result lives in (see
    :func:`rebase`).
    """
    _check_half(shift)
    if sd.etag != _etag(S) or len(sd.a) != S.n:
        raise SatakeError("Satake data does not match the space")
    factors = []
    for a, ap in zip(sd.a, sd.a_prime):
        factors.append(series_geom(a, 1, M))
        factors.append(series_geom(ap, 1, M))
    if sd.etag == "split":
        factors += [series_geom(sd.evals[0], 1, M), series_geom(sd.evals[1], 1, M)]
    elif sd.etag == "unram":
        factors.append(series_geom(sd.evals[0], 2, M))
    return series_product(factors, M)


def dV(sd: SatakeData, dimV: int, M: int, q: int, c=0) -> TruncSeries:
    """d^V(s) in X_c: prod_{2 <= j <= dimV-2, j even} zeta(omega, 2s - j); zeta(omega, 2s)^{-1} for dim 1."""
    if dimV < 1:
        raise SatakeError("dim V must be >= 1")
    if dimV == 1:
        return zeta(sd.omega, M, k=2, c=c, j=0, q=q).inverse()
    out = TruncSeries.one(M)
    for j in range(2, dimV - 1, 2):
        out = out * zeta(sd.omega, M, k=2, c=c, j=j, q=q)
    return out


def theorem_shift(dimV: int) -> Fraction:
    """The shift 1 - dim V / 2 of the standard L-function in the main series identity."""
    return Fraction(2 - dimV, 2)


def basic_function_coeffs(dimV: int, q: int, Mmax: int) -> tuple[list[Fraction], list[Fraction]]:
    """(p'_M for M <= Mmax, p_N for N <= Mmax).

    p' comes from prod_{0 <= j <= dimV-2, j even} (1 - q^j X)^{-1}; p drops the
    j = 0 factor.
    """
    p = TruncSeries.one(Mmax)
    for j in range(2, dimV - 1, 2):
        p = p * series_geom(Fraction(q) ** j, 1, Mmax)
    pprime = p * series_geom(1, 1, Mmax)
    return list(pprime.coeffs), list(p.coeffs)
