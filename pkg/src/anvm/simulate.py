"""Monte-Carlo estimate of the lattice-decoding error probability of A_n.

The all-zero codeword is sent (lattices are geometrically uniform, so every
codeword has the same error probability).  Noise is n+1 i.i.d. Gaussians
projected onto the zero-sum plane, which is isotropic Gaussian noise of the
same per-component variance inside the plane.

Trials are grouped into fixed-size blocks.  Block ``b`` draws from a Philox
counter-based stream keyed by ``(seed, b)``, so the trial sequence does not
depend on how many workers process it.  Blocks are merged in index order and
the run stops at the exact trial that produces the ``min_errors``-th error.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .errors import DomainError
from .lattice_an import nearest_point, project

__all__ = [
    "BLOCK_SIZE",
    "SimConfig",
    "SimResult",
    "block_stream",
    "gaussian",
    "run_trial",
    "block_errors",
    "run",
    "wilson_interval",
]

BLOCK_SIZE = 1 << 14
_Z95 = NormalDist().inv_cdf(0.975)
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SimConfig:
    n: int
    sigma: float
    min_errors: int = 500
    max_trials: int = 10**9
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"dimension must be >= 1, got {self.n}")
        if not self.sigma > 0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if self.min_errors < 1:
            raise DomainError("min_errors must be >= 1")
        if self.max_trials < self.min_errors:
            raise DomainError("max_trials must be >= min_errors")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")


@dataclass(frozen=True)
class SimResult:
    trials: int
    errors: int
    pe_hat: float
    ci95_low: float
    ci95_high: float
    censored: bool
    workers: int = 1


def block_stream(seed: int, block: int) -> np.random.Generator:
    """Independent Philox stream for one block of trials."""
    return np.random.Generator(np.random.Philox(key=[seed & _MASK64, block & _MASK64]))


def gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard normals by Box-Muller on the stream's uniform doubles."""
    count = int(np.prod(shape))
    half = (count + 1) // 2
    u1 = 1.0 - rng.random(half)  # (0, 1], keeps log finite
    u2 = rng.random(half)
    rad = np.sqrt(-2.0 * np.log(u1))
    z = np.concatenate([rad * np.cos(2 * np.pi * u2), rad * np.sin(2 * np.pi * u2)])
    return z[:count].reshape(shape)


def run_trial(n: int, sigma: float, rng: np.random.Generator) -> bool:
    """One transmission of the zero codeword; True on a decoding error."""
    y = project(sigma * gaussian(rng, n + 1))
    return bool(np.any(nearest_point(y) != 0))


def block_errors(n: int, sigma: float, seed: int, block: int, size: int = BLOCK_SIZE, codeword=None) -> np.ndarray:
    """Error indicators for one block.  ``codeword`` (a point of A_n) replaces
    the zero codeword when given."""
    rng = block_stream(seed, block)
    y = project(sigma * gaussian(rng, (size, n + 1)))
    if codeword is None:
        return np.any(nearest_point(y) != 0, axis=1)
    x = np.asarray(codeword, dtype=np.int64)
    return np.any(nearest_point(y + x) != x, axis=1)


def _block_error_positions(args):
    n, sigma, seed, block = args
    return np.flatnonzero(block_errors(n, sigma, seed, block))


def wilson_interval(errors: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    if trials <= 0:
        return 0.0, 1.0
    p = errors / trials
    z2 = z * z
    denom = 1 + z2 / trials
    centre = (p + z2 / (2 * trials)) / denom
    half = z / denom * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials))
    # clamp against rounding so that lo <= p <= hi holds exactly
    return max(0.0, min(p, centre - half)), min(1.0, max(p, centre + half))


def run(config: SimConfig) -> SimResult:
    """Run trials until ``min_errors`` errors or ``max_trials`` trials.

    A run cut off by ``max_trials`` comes back with ``censored=True``.
    """
    c = config
    trials = errors = 0
    block = 0
    pool = ProcessPoolExecutor(max_workers=c.workers) if c.workers > 1 else None
    try:
        while True:
            wave = list(range(block, block + c.workers))
            args = [(c.n, c.sigma, c.seed, b) for b in wave]
            results = pool.map(_block_error_positions, args) if pool else map(_block_error_positions, args)
            for positions in results:
                room = min(BLOCK_SIZE, c.max_trials - trials)
                positions = positions[positions < room]
                need = c.min_errors - errors
                if len(positions) >= need:
                    trials += int(positions[need - 1]) + 1
                    errors += need
                    return _result(trials, errors, False, c.workers)
                trials += room
                errors += len(positions)
                if trials >= c.max_trials:
                    return _result(trials, errors, True, c.workers)
            block += c.workers
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)


def _result(trials, errors, censored, workers):
    lo, hi = wilson_interval(errors, trials)
    return SimResult(trials, errors, errors / trials, lo, hi, censored, workers)
