"""Slow, independent reference computations for the test suite.

Nothing here shares code with the recursions it is used to check: the
hypercube integrals and cell moments are done by Gauss-Legendre quadrature,
and nearest points by exhaustive enumeration.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .errors import DomainError

__all__ = [
    "f_quadrature",
    "moment_quadrature",
    "lattice_points_within",
    "brute_force_nearest",
]


def _gl(k: int, lo, hi):
    x, w = np.polynomial.legendre.leggauss(k)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def f_quadrature(n: int, c: int, d: int, t: float = 1.0) -> float:
    """Integral over [0, t]^n of (sum x_j^2)^c (sum x_i)^d by tensor-product
    Gauss-Legendre.  The integrand is a polynomial of degree 2c + d in each
    variable, so c + d + 2 nodes per axis integrate it exactly."""
    if not 1 <= n <= 4:
        raise DomainError("f_quadrature supports 1 <= n <= 4")
    if c < 0 or d < 0:
        raise DomainError("c, d must be non-negative")
    if not 0 < t <= 1:
        raise DomainError("t must lie in (0, 1]")
    x, w = _gl(c + d + 2, 0.0, t)
    grids = np.meshgrid(*([x] * n), indexing="ij")
    weights = np.ones_like(grids[0])
    for wg in np.meshgrid(*([w] * n), indexing="ij"):
        weights = weights * wg
    sq = sum(g * g for g in grids)
    lin = sum(grids)
    return float(np.sum(weights * sq**c * lin**d))


def moment_quadrature(n: int, m: int, f=None, nodes: int = 40) -> float:
    """Moment of Vor(A_n) from the hypercube form of the cell integral.

    The cell integral becomes

        n sqrt(n+1) int_0^1 int_0^y int_[0,t]^(n-1) f(Q[t, 0, w]) / (1 - t) dw dt dy.

    Integration runs over w first, then t, then y.  The t-integrand blows up
    at t = 1, so the value of the inner integral at t = 1, call it h1, is
    subtracted before the t quadrature.  Its log term, -h1 log(1 - y), is put
    back analytically, and its y-integral is exactly h1.

    ``f`` maps an array (..., n+1) of plane points to values; the default is
    ||x||^(2m).  The reduction folds the cell onto one fundamental region, so
    ``f`` must be invariant under coordinate permutations and negation.
    """
    if not 1 <= n <= 3:
        raise DomainError("moment_quadrature supports 1 <= n <= 3")
    if not 0 <= m <= 3:
        raise DomainError("moment_quadrature supports 0 <= m <= 3")
    if f is None:
        def f(p):
            return np.sum(p * p, axis=-1) ** m

    wx, ww = np.polynomial.legendre.leggauss(max(m + 2, 4))

    def inner_w(t: float) -> float:
        if n == 1:
            v = np.array([t, 0.0])
            return float(f(v - v.mean()))
        xs = 0.5 * t * (wx + 1.0)
        ws = 0.5 * t * ww
        pts = np.array(list(itertools.product(xs, repeat=n - 1)))
        wts = np.prod(np.array(list(itertools.product(ws, repeat=n - 1))), axis=1)
        full = np.concatenate([np.full((len(pts), 1), t), np.zeros((len(pts), 1)), pts], axis=1)
        full -= full.mean(axis=1, keepdims=True)
        return float(np.sum(wts * f(full)))

    h1 = inner_w(1.0)
    yx, yw = _gl(nodes, 0.0, 1.0)
    outer = 0.0
    for y, wy in zip(yx, yw):
        tx, tw = _gl(nodes, 0.0, y)
        vals = np.array([(inner_w(t) - h1) / (1.0 - t) for t in tx])
        outer += wy * float(np.sum(tw * vals))
    outer += h1
    return n * np.sqrt(n + 1) * outer


@lru_cache(maxsize=64)
def _points_cached(n: int, radius: float) -> np.ndarray:
    r = int(np.floor(radius))
    rng = range(-r, r + 1)
    pts = []
    for head in itertools.product(rng, repeat=n):
        last = -sum(head)
        p = head + (last,)
        if sum(v * v for v in p) <= radius * radius + 1e-12:
            pts.append(p)
    arr = np.array(sorted(pts), dtype=np.int64)
    arr.setflags(write=False)
    return arr


def lattice_points_within(n: int, radius: float) -> np.ndarray:
    """All points of A_n with norm <= radius, sorted lexicographically."""
    if n < 1:
        raise DomainError("dimension must be >= 1")
    if radius < 0:
        raise DomainError("radius must be non-negative")
    return _points_cached(n, float(radius))


def brute_force_nearest(y, radius: float) -> np.ndarray:
    """Nearest A_n point to y by exhaustive search of the ball of ``radius``.

    Accepts one point or a stack.  Exact distance ties resolve to the
    lexicographically smallest candidate.
    """
    y = np.asarray(y, dtype=float)
    single = y.ndim == 1
    ys = np.atleast_2d(y)
    n = ys.shape[1] - 1
    cands = lattice_points_within(n, radius)
    if len(cands) == 0:
        raise DomainError("no lattice points within the search radius")
    d2 = np.sum(ys * ys, axis=1)[:, None] - 2.0 * ys @ cands.T + np.sum(cands * cands, axis=1)[None, :]
    best = cands[np.argmin(d2, axis=1)]
    return best[0] if single else best
