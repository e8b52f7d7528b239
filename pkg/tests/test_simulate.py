import math
from fractions import Fraction

import numpy as np
import pytest

from anvm.errors import DomainError
from anvm.errorprob import NoiseSpec, pc_series, sigma2_exact
from anvm.lattice_an import project
from anvm.simulate import (
    BLOCK_SIZE,
    SimConfig,
    block_errors,
    block_stream,
    gaussian,
    run,
    run_trial,
    wilson_interval,
)


class TestConfig:
    @pytest.mark.parametrize(
        "kw",
        [
            dict(n=0, sigma=1.0),
            dict(n=2, sigma=0.0),
            dict(n=2, sigma=1.0, min_errors=0),
            dict(n=2, sigma=1.0, min_errors=10, max_trials=5),
            dict(n=2, sigma=1.0, workers=0),
        ],
    )
    def test_domain(self, kw):
        with pytest.raises(DomainError):
            SimConfig(**kw)


class TestStreams:
    def test_reproducible(self):
        a = block_stream(5, 3).random(4)
        b = block_stream(5, 3).random(4)
        np.testing.assert_array_equal(a, b)

    def test_blocks_differ(self):
        assert not np.array_equal(block_stream(5, 3).random(4), block_stream(5, 4).random(4))

    def test_gaussian_moments(self):
        z = gaussian(block_stream(1, 0), (200_000,))
        assert abs(z.mean()) < 4 / math.sqrt(len(z))
        assert z.var() == pytest.approx(1.0, abs=0.015)

    def test_gaussian_odd_shape(self):
        assert gaussian(block_stream(0, 0), (3, 5)).shape == (3, 5)

    def test_projected_noise_variance(self):
        # projection keeps n of the n+1 dimensions: E||Pz||^2 = n sigma^2
        n, sigma = 4, 0.7
        y = project(sigma * gaussian(block_stream(2, 0), (100_000, n + 1)))
        sq = np.sum(y * y, axis=1)
        assert abs(sq.mean() - n * sigma**2) < 4 * sq.std() / math.sqrt(len(sq))


class TestTrials:
    def test_tiny_noise(self):
        assert not block_errors(3, 1e-6, 0, 0).any()

    def test_huge_noise(self):
        assert block_errors(3, 100.0, 0, 0).mean() > 0.99

    def test_single_trial(self):
        rng = block_stream(0, 0)
        assert run_trial(2, 1e-6, rng) is False

    def test_codeword_invariance(self):
        # same noise, shifted codeword: identical error pattern
        x = np.array([3, -1, -4, 2])
        np.testing.assert_array_equal(block_errors(3, 0.4, 9, 2), block_errors(3, 0.4, 9, 2, codeword=x))


class TestRun:
    def test_stops_at_min_errors(self):
        res = run(SimConfig(n=2, sigma=0.5, min_errors=37, seed=3))
        assert res.errors == 37
        assert not res.censored
        assert res.ci95_low <= res.pe_hat <= res.ci95_high

    def test_deterministic(self):
        cfg = SimConfig(n=3, sigma=0.3, min_errors=200, seed=11)
        assert run(cfg) == run(cfg)

    def test_independent_of_workers(self):
        one = run(SimConfig(n=2, sigma=0.2, min_errors=300, seed=4, workers=1))
        three = run(SimConfig(n=2, sigma=0.2, min_errors=300, seed=4, workers=3))
        assert (one.trials, one.errors) == (three.trials, three.errors)

    def test_censored(self):
        res = run(SimConfig(n=2, sigma=0.05, min_errors=10, max_trials=BLOCK_SIZE + 123))
        assert res.censored
        assert res.trials == BLOCK_SIZE + 123
        assert res.errors < 10

    def test_a1_against_erfc(self):
        sigma = 0.3
        p = math.erfc(1 / (2 * sigma))
        res = run(SimConfig(n=1, sigma=sigma, min_errors=2000, seed=1))
        assert abs(res.pe_hat - p) <= 4 * math.sqrt(p * (1 - p) / res.trials)

    def test_a2_against_series(self):
        n, snr = 2, 6.0
        s2 = sigma2_exact(snr, n)
        p = float(pc_series(n, NoiseSpec(s2, n)).pe)
        res = run(SimConfig(n=n, sigma=math.sqrt(float(s2)), min_errors=500, seed=2))
        assert abs(res.pe_hat - p) <= 4 * math.sqrt(p * (1 - p) / res.trials)


class TestWilson:
    def test_zero_errors(self):
        lo, hi = wilson_interval(0, 100)
        assert lo == 0.0 and 0 < hi < 0.05

    def test_all_errors(self):
        lo, hi = wilson_interval(100, 100)
        assert hi == 1.0 and lo > 0.95

    def test_no_trials(self):
        assert wilson_interval(0, 0) == (0.0, 1.0)

    def test_coverage(self):
        rng = np.random.default_rng(0)
        p, trials, reps = 0.03, 2000, 2000
        k = rng.binomial(trials, p, size=reps)
        hits = sum(lo <= p <= hi for lo, hi in (wilson_interval(int(e), trials) for e in k))
        assert hits / reps >= 0.93
