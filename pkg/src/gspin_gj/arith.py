"""Exact scalars, p-adic valuations and truncated power series in one variable."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Sequence


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def _ord_int(n: int, p: int) -> int:
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


@total_ordering
@dataclass(frozen=True)
class PadicVal:
    """A valuation: an integer, or +infinity (the valuation of zero)."""

    value: int = 0
    infinite: bool = False

    @classmethod
    def inf(cls) -> "PadicVal":
        return cls(0, True)

    def __add__(self, other: "PadicVal | int") -> "PadicVal":
        if isinstance(other, int):
            other = PadicVal(other)
        if self.infinite or other.infinite:
            return PadicVal.inf()
        return PadicVal(self.value + other.value)

    __radd__ = __add__

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return not self.infinite and self.value == other
        if not isinstance(other, PadicVal):
            return NotImplemented
        if self.infinite or other.infinite:
            return self.infinite and other.infinite
        return self.value == other.value

    def __lt__(self, other) -> bool:
        if isinstance(other, int):
            other = PadicVal(other)
        if self.infinite:
            return False
        if other.infinite:
            return True
        return self.value < other.value

    def __hash__(self) -> int:
        return hash((self.infinite, 0 if self.infinite else self.value))

    def __int__(self) -> int:
        if self.infinite:
            raise OverflowError("valuation of zero is infinite")
        return self.value

    def __repr__(self) -> str:
        return "+inf" if self.infinite else str(self.value)


def val_p(x, p: int) -> PadicVal:
    """ord_p(numerator) - ord_p(denominator); +inf for zero."""
    x = as_fraction(x)
    if x == 0:
        return PadicVal.inf()
    return PadicVal(_ord_int(x.numerator, p) - _ord_int(x.denominator, p))


def vp(x, p: int) -> int:
    """Integer valuation of a nonzero rational (raises on zero)."""
    return int(val_p(x, p))


def is_integral(x, p: int) -> bool:
    return as_fraction(x).denominator % p != 0


def abs_p(x, p: int) -> Fraction:
    """Normalized absolute value |x| = p^(-val x)."""
    x = as_fraction(x)
    if x == 0:
        return Fraction(0)
    return Fraction(p) ** (-vp(x, p))


class TruncSeries:
    """Power series c_0 + c_1 X + ... + c_M X^M, arithmetic exact modulo X^(M+1)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable, M: int | None = None):
        cs = [as_fraction(c) for c in coeffs]
        if M is not None:
            cs = (cs + [Fraction(0)] * (M + 1))[: M + 1]
        if not cs:
            raise ValueError("a series needs at least the constant coefficient")
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @property
    def M(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def one(cls, M: int) -> "TruncSeries":
        return cls([1], M)

    @classmethod
    def monomial(cls, c, k: int, M: int) -> "TruncSeries":
        cs = [Fraction(0)] * (M + 1)
        if k <= M:
            cs[k] = as_fraction(c)
        return cls(cs)

    def _coerce(self, other) -> "TruncSeries":
        if isinstance(other, TruncSeries):
            if other.M != self.M:
                raise ValueError(f"truncation mismatch: {self.M} vs {other.M}")
            return other
        return TruncSeries([other], self.M)

    def __add__(self, other) -> "TruncSeries":
        other = self._coerce(other)
        return TruncSeries([a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self) -> "TruncSeries":
        return TruncSeries([-a for a in self.coeffs])

    def __sub__(self, other) -> "TruncSeries":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "TruncSeries":
        return self._coerce(other) - self

    def __mul__(self, other) -> "TruncSeries":
        if not isinstance(other, TruncSeries):
            c = as_fraction(other)
            return TruncSeries([a * c for a in self.coeffs])
        other = self._coerce(other)
        M = self.M
        out = [Fraction(0)] * (M + 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j in range(M + 1 - i):
                b = other.coeffs[j]
                if b:
                    out[i + j] += a * b
        return TruncSeries(out)

    __rmul__ = __mul__

    def inverse(self) -> "TruncSeries":
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ZeroDivisionError("constant term is zero; series is not a unit")
        M = self.M
        inv = [Fraction(0)] * (M + 1)
        inv[0] = 1 / c0
        for k in range(1, M + 1):
            s = sum((self.coeffs[j] * inv[k - j] for j in range(1, k + 1)), Fraction(0))
            inv[k] = -s / c0
        return TruncSeries(inv)

    def __truediv__(self, other) -> "TruncSeries":
        if isinstance(other, TruncSeries):
            return self * other.inverse()
        return self * (1 / as_fraction(other))

    def __pow__(self, k: int) -> "TruncSeries":
        if k < 0:
            return self.inverse() ** (-k)
        out = TruncSeries.one(self.M)
        for _ in range(k):
            out = out * self
        return out

    def scale_var(self, c) -> "TruncSeries":
        """Substitute X -> c*X."""
        c = as_fraction(c)
        return TruncSeries([a * c**k for k, a in enumerate(self.coeffs)])

    def truncate(self, M: int) -> "TruncSeries":
        return TruncSeries(self.coeffs, M)

    def __eq__(self, other) -> bool:
        if isinstance(other, TruncSeries):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k]

    def as_strings(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    def __repr__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                terms.append(str(c))
            else:
                mon = "X" if k == 1 else f"X^{k}"
                terms.append(mon if c == 1 else f"{c}*{mon}")
        return "TruncSeries(" + (" + ".join(terms) or "0") + f"; M={self.M})"


def series_geom(a, d: int, M: int) -> TruncSeries:
    """Expand (1 - a X^d)^(-1) modulo X^(M+1)."""
    if d < 1:
        raise ValueError("series_geom needs d >= 1; (1 - a) is not a series unit in general")
    a = as_fraction(a)
    cs = [Fraction(0)] * (M + 1)
    k = 0
    while k * d <= M:
        cs[k * d] = a**k
        k += 1
    return TruncSeries(cs)


def series_product(factors: Sequence[TruncSeries], M: int) -> TruncSeries:
    out = TruncSeries.one(M)
    for f in factors:
        out = out * f
    return out
