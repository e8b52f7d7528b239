"""Probability of correct lattice decoding on the AWGN channel.

P_C is the Gaussian measure of Vor(A_n).  Expanding the Gaussian in powers of
||x||^2 turns it into the alternating moment series

    P_C = sqrt(n+1) / (2 pi sigma^2)^(n/2) * sum_m (-1)^m r_m / ((2 sigma^2)^m m!)

with r_m the rational moment cofactors.  The terms grow by many orders of
magnitude before the factorial wins, so the partial sums are accumulated as
exact rationals and only the final value is rounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from scipy.special import erfc

from .errors import DomainError, SeriesNotConverged
from .gtable import GTable
from .moments import moment_coefficients

__all__ = [
    "NoiseSpec",
    "SeriesResult",
    "SnrPoint",
    "PeCurvePoint",
    "pc_series",
    "snr_to_sigma2",
    "sigma2_exact",
    "union_bound_e8",
    "pe_curve",
    "terms_estimate",
]

GUARD_DIGITS = 10


@dataclass(frozen=True)
class NoiseSpec:
    sigma2: Fraction
    n: int

    def __post_init__(self):
        s2 = _to_fraction(self.sigma2)
        if s2 <= 0:
            raise DomainError(f"noise variance must be positive, got {self.sigma2}")
        if self.n < 1:
            raise DomainError(f"dimension must be >= 1, got {self.n}")
        object.__setattr__(self, "sigma2", s2)


@dataclass(frozen=True)
class SeriesResult:
    pc: mpmath.mpf
    pe: mpmath.mpf
    terms_used: int
    last_term_magnitude: mpmath.mpf


@dataclass(frozen=True)
class SnrPoint:
    snr_linear: float
    snr_db: float
    sigma2: float


@dataclass(frozen=True)
class PeCurvePoint:
    snr_db: float
    snr_linear: float
    sigma2: float
    pe: float
    pc: float
    terms_used: int
    converged: bool
    message: str = ""


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, mpmath.mpf):
        return _mpf_fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def _mpf_fraction(x: mpmath.mpf) -> Fraction:
    man, exp = int(x.man), int(x.exp)
    return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2**-exp)


def _covering_radius2(n: int) -> Fraction:
    a = (n + 1) // 2
    return Fraction(a * (n + 1 - a), n + 1)


def terms_estimate(n: int, sigma2, tol) -> int:
    """Number of series terms that always suffices, from ||x|| <= covering radius.

    Each moment is at most volume * R^(2m), so the true terms are dominated by
    a Poisson-shaped envelope; this returns where that envelope falls below
    ``tol``.  It over-counts somewhat, which only costs moment precomputation.
    """
    s2 = float(sigma2)
    x = float(_covering_radius2(n)) / (2 * s2)
    log_pref = 0.5 * math.log(n + 1) - 0.5 * n * math.log(2 * math.pi * s2)
    log_tol = math.log(float(tol))
    m = 0
    while True:
        lt = log_pref + m * math.log(x) - math.lgamma(m + 1)
        if m > x and m >= n and lt < log_tol:
            return m + 1
        m += 1


def pc_series(
    n: int,
    spec: NoiseSpec,
    tol=Fraction(1, 10**16),
    max_terms: int = 2000,
    table: GTable | None = None,
) -> SeriesResult:
    """Sum the moment series for P_C until the tail is below ``tol``.

    The series alternates, so once term magnitudes are decreasing the
    truncation error is at most the first omitted term.  The loop stops at
    the first m >= n whose term is below ``tol`` (after the prefactor) and
    smaller than its predecessor; that term is included in the sum.
    """
    if spec.n != n:
        raise DomainError(f"noise spec is for n={spec.n}, asked for n={n}")
    tol = _to_fraction(tol)
    if tol <= 0:
        raise DomainError("tol must be positive")
    if max_terms < 1:
        raise DomainError("max_terms must be >= 1")
    if table is None:
        table = GTable()

    digits = max(15, math.ceil(-math.log10(float(tol)))) + GUARD_DIGITS
    s2 = spec.sigma2
    budget = min(max_terms, terms_estimate(n, s2, tol))
    r = moment_coefficients(n, budget - 1, table)

    with mpmath.workdps(digits):
        pref = mpmath.sqrt(n + 1) / (2 * mpmath.pi * mpmath.mpf(s2.numerator) / s2.denominator) ** (
            mpmath.mpf(n) / 2
        )
        limit = mpmath.mpf(tol.numerator) / tol.denominator / pref

        total = Fraction(0)
        scale = Fraction(1)
        prev_mag = None
        two_s2 = 2 * s2
        for m in range(max_terms):
            if m >= len(r):
                r = moment_coefficients(n, min(max_terms, 2 * len(r)) - 1, table)
            if m:
                scale *= two_s2 * m
            term = r[m] / scale
            total += -term if m % 2 else term
            mag = mpmath.mpf(term.numerator) / term.denominator
            if m >= n and prev_mag is not None and mag < prev_mag and mag < limit:
                pc = pref * mpmath.mpf(total.numerator) / total.denominator
                return SeriesResult(pc, 1 - pc, m + 1, pref * mag)
            prev_mag = mag

        pc = pref * mpmath.mpf(total.numerator) / total.denominator
    raise SeriesNotConverged(
        f"moment series for n={n}, sigma^2={float(s2):.6g} did not reach tol within {max_terms} terms",
        partial=pc,
        terms_used=max_terms,
    )


def snr_to_sigma2(snr_db: float, n: int) -> SnrPoint:
    """SNR = V^(2/n) / (4 sigma^2) with V = sqrt(n+1) the cell volume."""
    if n < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    snr_linear = 10.0 ** (snr_db / 10.0)
    sigma2 = (n + 1) ** (1.0 / n) / (4.0 * snr_linear)
    return SnrPoint(snr_linear, float(snr_db), sigma2)


def sigma2_exact(snr_db, n: int, dps: int = 50) -> Fraction:
    """sigma^2 for an SNR in dB, rounded to ``dps`` digits and returned as
    an exact rational so the series can run in exact arithmetic."""
    with mpmath.workdps(dps):
        snr = mpmath.power(10, mpmath.mpf(str(snr_db)) / 10)
        s2 = mpmath.power(n + 1, mpmath.mpf(1) / n) / (4 * snr)
        return _mpf_fraction(s2)


def union_bound_e8(sigma: float) -> float:
    """Union bound over the 240 minimal vectors of E_8, clamped to 1."""
    if sigma <= 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    return min(1.0, 240.0 * float(erfc(1.0 / (2.0 * sigma))))


def pe_curve(
    n: int,
    snr_db_grid,
    tol=Fraction(1, 10**16),
    table: GTable | None = None,
    max_terms: int = 2000,
) -> list[PeCurvePoint]:
    """Series error probability at each SNR, in grid order.

    Points that fail to converge are returned with ``converged=False`` and
    NaN probabilities; the rest of the curve is still computed.
    """
    grid = list(snr_db_grid)
    if not grid:
        raise DomainError("empty SNR grid")
    if table is None:
        table = GTable()
    tol = _to_fraction(tol)

    # the highest SNR needs the most moments; computing it first sizes the cache once
    order = sorted(range(len(grid)), key=lambda i: -grid[i])
    rows: dict[int, PeCurvePoint] = {}
    for i in order:
        snr = grid[i]
        pt = snr_to_sigma2(snr, n)
        s2 = sigma2_exact(snr, n)
        try:
            res = pc_series(n, NoiseSpec(s2, n), tol, max_terms, table)
        except SeriesNotConverged as exc:
            rows[i] = PeCurvePoint(snr, pt.snr_linear, pt.sigma2, math.nan, math.nan, exc.terms_used, False, str(exc))
            continue
        rows[i] = PeCurvePoint(snr, pt.snr_linear, pt.sigma2, float(res.pe), float(res.pc), res.terms_used, True)
    return [rows[i] for i in range(len(grid))]
