"""Exact values of the hypercube integral G(n, c, d).

G(n, c, d) is the mean of (x_1^2 + ... + x_n^2)^c (x_1 + ... + x_n)^d over the
unit cube [0, 1]^n.  It is rational and obeys

    G(n, c, d) = sum_{c', d'} C(c, c') C(d, d') G(n-1, c-c', d-d') / (2c' + d' + 1)

with G(1, c, d) = 1/(2c + d + 1) and G(n, 0, 0) = 1.

Two evaluation routes share one table:

* :func:`g` runs the recursion above depth-first and memoizes every value it
  touches.  Cost per entry is O(c d), fine for the small orders used by
  closed forms and tests.
* :meth:`GTable.slab` fills a whole triangle ``2c + d <= max_degree`` of one
  level at once.  It uses an integration-by-parts identity over tables with
  some coordinates pinned at 1, costing O(1) per entry.  This is what makes
  moment orders in the hundreds affordable.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import comb, lcm

from .errors import DomainError

__all__ = ["GKey", "GTable", "g"]


@dataclass(frozen=True)
class GKey:
    n: int
    c: int
    d: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"G requires n >= 1, got n={self.n}")
        if self.c < 0 or self.d < 0:
            raise DomainError(f"G requires c, d >= 0, got c={self.c}, d={self.d}")


@dataclass(frozen=True)
class Slab:
    """One level of G stored as integers over a common denominator.

    ``rows[c][d] / denominator == G(n, c, d)`` for ``2c + d <= max_degree``.
    """

    n: int
    max_degree: int
    denominator: int
    rows: tuple

    def covers(self, c: int, d: int) -> bool:
        return 2 * c + d <= self.max_degree

    def value(self, c: int, d: int) -> Fraction:
        return Fraction(self.rows[c][d], self.denominator)


class GTable:
    """Memo table mapping ``GKey`` to exact rationals.

    Safe to share between threads: inserts go through a lock and stored
    values never change.  Two threads computing the same key is harmless.
    """

    def __init__(self):
        self._entries: dict[tuple[int, int, int], Fraction] = {}
        self._slabs: dict[int, Slab] = {}
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._entries)

    def __contains__(self, key) -> bool:
        return self.lookup(*_as_tuple(key)) is not None

    def __getitem__(self, key) -> Fraction:
        v = self.lookup(*_as_tuple(key))
        if v is None:
            raise KeyError(key)
        return v

    def keys(self):
        return list(self._entries)

    def lookup(self, n: int, c: int, d: int) -> Fraction | None:
        v = self._entries.get((n, c, d))
        if v is not None:
            return v
        s = self._slabs.get(n)
        if s is not None and s.covers(c, d):
            v = s.value(c, d)
            self.insert(n, c, d, v)
            return v
        return None

    def insert(self, n: int, c: int, d: int, value: Fraction) -> Fraction:
        with self._lock:
            return self._entries.setdefault((n, c, d), value)

    def slab(self, n: int, max_degree: int) -> Slab:
        """Return level ``n`` for every (c, d) with ``2c + d <= max_degree``.

        ``n = 0`` is accepted here (the empty cube: G(0, c, d) is 1 at the
        origin and 0 elsewhere) because the moment formula reaches it when
        the lattice dimension is 1.
        """
        if n < 0 or max_degree < 0:
            raise DomainError(f"slab needs n >= 0 and max_degree >= 0, got {n}, {max_degree}")
        s = self._slabs.get(n)
        if s is not None and s.max_degree >= max_degree:
            return s
        s = _fill_slab(n, max_degree)
        with self._lock:
            old = self._slabs.get(n)
            if old is None or old.max_degree < s.max_degree:
                self._slabs[n] = s
            else:
                s = old
        return s


def _as_tuple(key):
    if isinstance(key, GKey):
        return key.n, key.c, key.d
    n, c, d = key
    return n, c, d


def g(key, table: GTable | None = None) -> Fraction:
    """Exact G(n, c, d) by the defining recursion, memoized into ``table``.

    ``key`` may be a :class:`GKey` or an ``(n, c, d)`` tuple.
    """
    if not isinstance(key, GKey):
        key = GKey(*key)
    if table is None:
        table = GTable()
    return _g(table, key.n, key.c, key.d)


def _g(table: GTable, n: int, c: int, d: int) -> Fraction:
    hit = table.lookup(n, c, d)
    if hit is not None:
        return hit
    if n == 1:
        v = Fraction(1, 2 * c + d + 1)
    elif c == 0 and d == 0:
        v = Fraction(1)
    else:
        # accumulate over a common denominator; cheaper than Fraction adds
        num, den = 0, 1
        for cp in range(c + 1):
            bc = comb(c, cp)
            for dp in range(d + 1):
                prev = _g(table, n - 1, c - cp, d - dp)
                tn = bc * comb(d, dp) * prev.numerator
                td = prev.denominator * (2 * cp + dp + 1)
                num = num * td + tn * den
                den *= td
        v = Fraction(num, den)
    return table.insert(n, c, d, v)


def _fill_slab(n: int, max_degree: int) -> Slab:
    # P(k, p)(c, d) = mean over k free uniform coordinates plus p coordinates
    # pinned at 1 of (sum of squares)^c (sum)^d.  Integrating the last free
    # coordinate by parts gives, for c >= 0 and d >= 1,
    #
    #   2(c+1) P(k,p)(c, d) = k [P(k-1,p+1) - P(k-1,p)](c+1, d-1)
    #                         - k (d-1) P(k,p)(c+1, d-2) + 2p(c+1) P(k,p)(c, d-1)
    #
    # The d = 0 column is a one-dimensional binomial recursion.  Level k
    # reads level k-1 one degree higher, so level j is built to degree
    # max_degree + (n - j).  P(k, p) values are kept scaled by L**k with
    # L = lcm(1..top+1); every division below is exact.
    if n == 0:
        rows = tuple(
            tuple(1 if (c == 0 and d == 0) else 0 for d in range(max_degree - 2 * c + 1))
            for c in range(max_degree // 2 + 1)
        )
        return Slab(0, max_degree, 1, rows)

    top = max_degree + n
    big_l = 1
    for i in range(1, top + 2):
        big_l = lcm(big_l, i)
    inv_odd = [big_l // (2 * a + 1) for a in range(top // 2 + 1)]

    prev = {}
    for p in range(n + 1):
        prev[p] = [[p ** (c + d) for d in range(top - 2 * c + 1)] for c in range(top // 2 + 1)]

    for k in range(1, n + 1):
        deg = max_degree + n - k
        cur = {}
        for p in range(n - k + 1):
            lo, hi = prev[p], prev[p + 1]
            t = [[0] * (deg - 2 * c + 1) for c in range(deg // 2 + 1)]
            for c in range(deg // 2 + 1):
                t[c][0] = sum(comb(c, a) * lo[c - a][0] * inv_odd[a] for a in range(c + 1))
            k_l = k * big_l
            for c in reversed(range(deg // 2 + 1)):
                row = t[c]
                two = 2 * (c + 1)
                pin = 2 * p * (c + 1)
                if len(row) == 1:
                    continue
                hi1, lo1 = hi[c + 1], lo[c + 1]
                up = t[c + 1] if c + 1 < len(t) else None
                for d in range(1, len(row)):
                    v = k_l * (hi1[d - 1] - lo1[d - 1]) + pin * row[d - 1]
                    if d >= 2:
                        v -= k * (d - 1) * up[d - 2]
                    row[d] = v // two
            cur[p] = t
        prev = cur

    rows = tuple(tuple(r) for r in prev[0])
    return Slab(n, max_degree, big_l ** n, rows)
