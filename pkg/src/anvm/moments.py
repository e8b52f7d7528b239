"""Exact moments of the Voronoi cell of A_n.

The m-th moment M_n(m) is the integral of ||x||^(2m) over Vor(A_n).  It is
always a rational multiple of sqrt(n+1), so :class:`ExactMoment` stores only
that rational cofactor and the square root is applied when rendering.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, gcd, isqrt, lcm, log10, sqrt

from .errors import DomainError
from .gtable import GTable, g

__all__ = [
    "ExactMoment",
    "ClosedFormMoment",
    "h_value",
    "exact_moment",
    "moment_coefficients",
    "closed_form",
    "moment_decimal",
]

# orders above this pull G from a bulk slab instead of the depth-first recursion
_LITERAL_MAX_M = 8


@dataclass(frozen=True)
class ExactMoment:
    n: int
    m: int
    coeff: Fraction

    def __float__(self):
        return float(self.coeff) * sqrt(self.n + 1)


@dataclass(frozen=True)
class ClosedFormMoment:
    """M_n(m) = poly(n) / (denom_const * (1 + n)^(half_power / 2)).

    ``numerator`` holds the polynomial coefficients in ascending powers of n.
    """

    m: int
    numerator: tuple
    denom_const: Fraction
    half_power: int

    def poly(self, n) -> Fraction:
        return sum((Fraction(c) * n**i for i, c in enumerate(self.numerator)), Fraction(0))

    def coeff(self, n: int) -> Fraction:
        """Rational r with M_n(m) = r * sqrt(n + 1)."""
        # (1+n)^(p/2) * sqrt(1+n) = (1+n)^m since p = 2m - 1
        return self.poly(n) / (self.denom_const * Fraction(1 + n) ** self.m)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "numerator": [_ratstr(c) for c in self.numerator],
            "denom_const": _ratstr(self.denom_const),
            "half_power": self.half_power,
        }


def _ratstr(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


@lru_cache(maxsize=None)
def _fact(k: int) -> int:
    return factorial(k)


def h_value(n: int, m: int, k: int, a: int, b: int) -> Fraction:
    return Fraction(
        (n + 1) ** (m - a) * _fact(a) * _fact(m - k) * _fact(b) * _fact(k - a - b),
        2**b * n ** (m - k),
    )


def _check(n: int, m: int):
    if n < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    if m < 0:
        raise DomainError(f"moment order must be >= 0, got {m}")


def exact_moment(n: int, m: int, table: GTable | None = None) -> ExactMoment:
    """M_n(m) via the triple sum over (k, a, b) of G(n-1, a, 2k-2a-b) / (+-H).

    Every operation is on exact rationals.  G(0, c, d) is the empty-cube
    value: 1 when c = d = 0, otherwise 0.
    """
    _check(n, m)
    if table is None:
        table = GTable()
    if n == 1:
        def gval(a, d):
            return Fraction(1) if a == 0 and d == 0 else Fraction(0)
    elif m > _LITERAL_MAX_M:
        slab = table.slab(n - 1, 2 * m)

        def gval(a, d):
            return Fraction(slab.rows[a][d], slab.denominator)
    else:
        def gval(a, d):
            return g((n - 1, a, d), table)

    total = Fraction(0)
    for k in range(m + 1):
        for a in range(k + 1):
            sign = -1 if (k - a) % 2 else 1
            for b in range(k - a + 1):
                gv = gval(a, 2 * k - 2 * a - b)
                if gv:
                    total += sign * gv / h_value(n, m, k, a, b)
    coeff = total * _fact(m) * n / (n + 2 * m)
    return ExactMoment(n, m, coeff)


_SEQ_CACHE: "weakref.WeakKeyDictionary[GTable, dict[int, list[Fraction]]]" = weakref.WeakKeyDictionary()


def moment_coefficients(n: int, max_m: int, table: GTable | None = None) -> list[Fraction]:
    """Cofactors r_0..r_max_m of M_n(m) = r_m sqrt(n+1), all at once.

    Same triple sum as :func:`exact_moment`, regrouped by a and j = k - a so
    the inner sums are shared between orders.  With G(n-1, a, d) held as
    integers over one denominator D:

        U(a, j) = sum_b C(j, b) 2^b G(a, 2j - b)
        T(a, s) = sum_j C(s, j) (-1)^j n^(s-j) U(a, j)
        r_m     = n / ((n + 2m)(n+1)^m D) * sum_a C(m, a) (n+1)^a T(a, m - a)

    Results are cached per table.
    """
    _check(n, max_m)
    if table is None:
        table = GTable()
    per_table = _SEQ_CACHE.setdefault(table, {})
    have = per_table.get(n)
    if have is not None and len(have) > max_m:
        return have[: max_m + 1]

    slab = table.slab(n - 1, 2 * max_m)
    rows, den = slab.rows, slab.denominator
    big_m = max_m

    u = [[0] * (big_m - a + 1) for a in range(big_m + 1)]
    for j in range(big_m + 1):
        weights = [comb(j, b) << b for b in range(j + 1)]
        for a in range(big_m - j + 1):
            row = rows[a]
            u[a][j] = sum(w * row[2 * j - b] for b, w in enumerate(weights))

    npow = [n**i for i in range(big_m + 1)]
    t = [[0] * (big_m - a + 1) for a in range(big_m + 1)]
    for s in range(big_m + 1):
        weights = [(-1) ** j * comb(s, j) * npow[s - j] for j in range(s + 1)]
        for a in range(big_m - s + 1):
            ua = u[a]
            t[a][s] = sum(w * ua[j] for j, w in enumerate(weights))

    out = []
    for m in range(big_m + 1):
        acc = sum(comb(m, a) * (n + 1) ** a * t[a][m - a] for a in range(m + 1))
        out.append(Fraction(n * acc, (n + 2 * m) * (n + 1) ** m * den))
    per_table[n] = out
    return list(out)


def _interpolate(xs, ys) -> list[Fraction]:
    """Monomial coefficients (ascending) of the polynomial through the points."""
    k = len(xs)
    dd = list(ys)
    for level in range(1, k):
        for i in range(k - 1, level - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level])
    coeffs = [Fraction(0)] * k
    # Horner expansion of the Newton form
    for i in range(k - 1, -1, -1):
        shifted = [Fraction(0)] + coeffs[:-1]
        coeffs = [s - xs[i] * c for s, c in zip(shifted, coeffs)]
        coeffs[0] += dd[i]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def closed_form(m: int, table: GTable | None = None) -> ClosedFormMoment:
    """Polynomial-in-n form of M_n(m), recovered by exact interpolation.

    r(n, m) (1 + n)^m is a polynomial of degree at most 2m in n.  It is fitted
    through n = 1..2m+1 and must reproduce n = 2m+2 and 2m+3 exactly.
    """
    if m < 0:
        raise DomainError(f"moment order must be >= 0, got {m}")
    if table is None:
        table = GTable()
    npts = 2 * m + 1
    xs = list(range(1, npts + 3))
    ys = [exact_moment(x, m, table).coeff * (1 + x) ** m for x in xs]
    coeffs = _interpolate(xs[:npts], ys[:npts])
    for x, y in zip(xs[npts:], ys[npts:]):
        if sum(c * x**i for i, c in enumerate(coeffs)) != y:
            raise ArithmeticError(f"closed form for m={m} failed its check at n={x}")

    den = lcm(*(c.denominator for c in coeffs))
    ints = [int(c * den) for c in coeffs]
    common = gcd(*ints)
    numerator = tuple(Fraction(v // common) for v in ints)
    return ClosedFormMoment(m, numerator, Fraction(den, common), 2 * m - 1)


def moment_decimal(em: ExactMoment, digits: int) -> str:
    """r sqrt(n+1) rounded half-up to ``digits`` significant digits.

    Rounding is done on integers (square of the value is rational), so the
    result is exact, including when n + 1 is a perfect square.
    """
    if digits < 1:
        raise DomainError(f"digits must be >= 1, got {digits}")
    sq = em.coeff * em.coeff * (em.n + 1)
    if sq == 0:
        return "0"

    def rounded(e):
        # round(sqrt(sq) * 10^e) == (floor(sqrt(4 sq 10^2e)) + 1) // 2
        q = 4 * sq * Fraction(10) ** (2 * e)
        return (isqrt(q.numerator // q.denominator) + 1) // 2

    mag = _log10_fraction(sq) / 2
    e = digits - 1 - int(mag // 1)
    val = rounded(e)
    while val >= 10**digits:
        e -= 1
        val = rounded(e)
    while val < 10 ** (digits - 1):
        e += 1
        val = rounded(e)
    digs = str(val)
    if e <= 0:
        return digs + "0" * -e
    digs = digs.rjust(e + 1, "0")
    return digs[:-e] + "." + digs[-e:]


def _log10_fraction(q: Fraction) -> float:
    return log10(q.numerator) - log10(q.denominator)
