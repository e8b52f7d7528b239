"""The root lattice A_n inside the zero-sum plane of R^(n+1).

Points are numpy arrays whose last axis has length n + 1.  Every function
accepts a single vector or a stack of them.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

__all__ = [
    "PLANE_TOL",
    "project",
    "generator_basis",
    "nearest_point",
    "in_voronoi",
    "sample_voronoi_uniform",
    "sample_cube_projected",
]

PLANE_TOL = 1e-9


def project(x):
    """Orthogonal projection onto the zero-sum plane: x - mean(x) * 1."""
    x = np.asarray(x, dtype=float)
    return x - x.mean(axis=-1, keepdims=True)


def generator_basis(n: int) -> np.ndarray:
    """(n+1, n) integer matrix whose i-th column is e_i - e_{i+1}."""
    if n < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    b = np.zeros((n + 1, n), dtype=np.int64)
    idx = np.arange(n)
    b[idx, idx] = 1
    b[idx + 1, idx] = -1
    return b


def _check_plane(y: np.ndarray):
    if y.shape[-1] < 2:
        raise DomainError("A_n points need at least 2 coordinates")
    s = np.abs(y.sum(axis=-1))
    if np.any(s > PLANE_TOL):
        raise DomainError(f"point is off the zero-sum plane (|sum| = {float(np.max(s)):.3g})")


def nearest_point(y) -> np.ndarray:
    """Closest point of A_n to y, which must lie in the zero-sum plane.

    Round every coordinate, then repair the coordinate sum.  If the rounded
    vector sums to D > 0, the D coordinates that were rounded up the furthest
    (smallest y_i - round(y_i)) go down by one; for D < 0 the |D| coordinates
    rounded down the furthest go up by one.  Ties go to the lowest index.
    """
    y = np.asarray(y, dtype=float)
    _check_plane(y)
    single = y.ndim == 1
    ys = y.reshape(-1, y.shape[-1])

    f = np.floor(ys + 0.5)
    deficit = f.sum(axis=1).astype(np.int64)
    resid = ys - f
    out = f.astype(np.int64)

    dn = deficit > 0
    if np.any(dn):
        order = np.argsort(resid[dn], axis=1, kind="stable")
        out[dn] -= _first_k_mask(order, deficit[dn])
    up = deficit < 0
    if np.any(up):
        order = np.argsort(-resid[up], axis=1, kind="stable")
        out[up] += _first_k_mask(order, -deficit[up])

    return out[0] if single else out.reshape(y.shape)


def _first_k_mask(order: np.ndarray, k: np.ndarray) -> np.ndarray:
    rank = np.empty_like(order)
    np.put_along_axis(rank, order, np.arange(order.shape[1])[None, :], axis=1)
    return (rank < k[:, None]).astype(np.int64)


def in_voronoi(y):
    """True where y decodes to the origin (half-open cell)."""
    x = nearest_point(y)
    return ~np.any(x != 0, axis=-1)


def sample_voronoi_uniform(n: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Uniform draws from Vor(A_n): a uniform point of the fundamental
    parallelepiped, reduced modulo the lattice."""
    shape = (1 if size is None else size, n)
    y = rng.random(shape) @ generator_basis(n).T.astype(float)
    o = y - nearest_point(y)
    return o[0] if size is None else o


def sample_cube_projected(n: int, rng: np.random.Generator, size: int | None = None):
    """Projected uniform cube points with importance weights.

    x is uniform in [-1/2, 1/2)^(n+1).  Averaging f(Qx) * w estimates the
    integral of f over Vor(A_n); the weight
    w = 1 / (sqrt(n+1) (1 - max(x) + min(x))) undoes the length of the cube
    fibre lying over each projected point.
    """
    shape = (1 if size is None else size, n + 1)
    x = rng.random(shape) - 0.5
    w = 1.0 / (np.sqrt(n + 1) * (1.0 - x.max(axis=1) + x.min(axis=1)))
    q = project(x)
    if size is None:
        return q[0], float(w[0])
    return q, w
