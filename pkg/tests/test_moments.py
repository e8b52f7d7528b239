from fractions import Fraction
from math import sqrt

import numpy as np
import pytest

from anvm.errors import DomainError
from anvm.gtable import GTable
from anvm.lattice_an import sample_voronoi_uniform
from anvm.moments import (
    ExactMoment,
    closed_form,
    exact_moment,
    h_value,
    moment_coefficients,
    moment_decimal,
)
from anvm.oracles import moment_quadrature

# reference closed forms for m <= 4: (numerator ascending in n, denominator)
REFERENCE = {
    0: ([1], 1),
    1: ([0, 3, 1], 12),
    2: ([0, 50, 55, 34, 5], 720),
    3: ([0, 1960, 2142, 2681, 1423, 399, 35], 60480),
    4: ([0, 93744, 34356, 112172, 89343, 53224, 17246, 2940, 175], 3628800),
}


def reference_coeff(n, m):
    poly, den = REFERENCE[m]
    # M_n(m) = poly(n) / (den (1+n)^((2m-1)/2)) = r sqrt(n+1)  =>  r = poly(n) / (den (1+n)^m)
    return Fraction(sum(c * n**i for i, c in enumerate(poly)), den * (1 + n) ** m)


@pytest.fixture(scope="module")
def table():
    return GTable()


class TestExactMoment:
    def test_volume(self, table):
        assert exact_moment(4, 0, table).coeff == 1

    def test_second_moment_n2(self, table):
        assert exact_moment(2, 1, table).coeff == Fraction(5, 18)

    def test_second_moment_n1(self, table):
        # segment of length sqrt(2): integral of x^2 is sqrt(2)/6
        assert exact_moment(1, 1, table).coeff == Fraction(1, 6)

    def test_fourth_moment_n2(self, table):
        assert exact_moment(2, 2, table).coeff == Fraction(14, 135)

    @pytest.mark.parametrize("m", range(8))
    def test_a1_is_a_segment(self, table, m):
        # Vor(A_1) = [-1/sqrt2, 1/sqrt2]: integral of x^(2m) = 2 (1/sqrt2)^(2m+1) / (2m+1)
        assert exact_moment(1, m, table).coeff == Fraction(1, (2 * m + 1) * 2**m)

    @pytest.mark.parametrize("n,m", [(0, 1), (-2, 0), (3, -1)])
    def test_domain(self, n, m):
        with pytest.raises(DomainError):
            exact_moment(n, m)

    def test_h_is_positive(self):
        assert all(
            h_value(5, 4, k, a, b) > 0 for k in range(5) for a in range(k + 1) for b in range(k - a + 1)
        )

    @pytest.mark.parametrize("m", range(5))
    @pytest.mark.parametrize("n", range(1, 13))
    def test_reference_closed_forms(self, table, n, m):
        assert exact_moment(n, m, table).coeff == reference_coeff(n, m)

    def test_positive(self, table):
        assert all(exact_moment(n, m, table).coeff > 0 for n in range(1, 6) for m in range(7))

    def test_high_order_uses_slab(self, table):
        # above the literal threshold the triple sum reads G from a bulk slab
        assert exact_moment(3, 12, table).coeff == moment_coefficients(3, 12, table)[12]


class TestMomentCoefficients:
    @pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
    def test_bulk_matches_triple_sum(self, n):
        bulk = moment_coefficients(n, 9, GTable())
        ref = GTable()
        assert bulk == [exact_moment(n, m, ref).coeff for m in range(10)]

    def test_cached_prefix(self):
        t = GTable()
        long = moment_coefficients(4, 15, t)
        assert moment_coefficients(4, 6, t) == long[:7]

    def test_log_convex(self):
        # moments of ||x||^2 are log-convex in m
        r = moment_coefficients(3, 40, GTable())
        assert all(r[m] * r[m] <= r[m - 1] * r[m + 1] for m in range(1, 40))


class TestClosedForm:
    def test_m1(self, table):
        cf = closed_form(1, table)
        assert cf.numerator == (0, 3, 1)
        assert cf.denom_const == 12
        assert cf.half_power == 1

    def test_m0(self, table):
        cf = closed_form(0, table)
        assert cf.numerator == (1,)
        assert cf.denom_const == 1
        assert cf.half_power == -1

    def test_m3(self, table):
        cf = closed_form(3, table)
        assert list(cf.numerator) == [0, 1960, 2142, 2681, 1423, 399, 35]
        assert cf.denom_const == 60480
        assert cf.half_power == 5

    @pytest.mark.parametrize("m", range(7))
    def test_extrapolates(self, table, m):
        # certify the degree bound on 2m+5 points outside the fitting set
        cf = closed_form(m, table)
        assert len(cf.numerator) <= 2 * m + 1
        for n in range(2 * m + 4, 4 * m + 9):
            assert cf.coeff(n) == exact_moment(n, m, table).coeff

    def test_json(self, table):
        js = closed_form(1, table).to_json()
        assert js == {"m": 1, "numerator": ["0/1", "3/1", "1/1"], "denom_const": "12/1", "half_power": 1}


class TestDecimal:
    def test_square_volume(self):
        assert moment_decimal(ExactMoment(3, 0, Fraction(1)), 10) == "2.000000000"

    def test_hexagon_second_moment(self):
        assert moment_decimal(ExactMoment(2, 1, Fraction(5, 18)), 6) == "0.481125"

    def test_segment(self):
        assert moment_decimal(ExactMoment(1, 1, Fraction(1, 6)), 6) == "0.235702"

    def test_carry_into_new_digit(self):
        # coeff * sqrt(4) = 99.99996, which rounds up to 100.000 at 6 digits
        em = ExactMoment(3, 0, Fraction(9999996, 200000))
        assert moment_decimal(em, 6) == "100.000"

    def test_large_precision_against_float(self):
        em = exact_moment(5, 7)
        s = moment_decimal(em, 40)
        assert len(s.replace(".", "").lstrip("0")) == 40
        assert float(s) == pytest.approx(float(em.coeff) * sqrt(6), rel=1e-15)

    def test_rejects_zero_digits(self):
        with pytest.raises(DomainError):
            moment_decimal(ExactMoment(1, 0, Fraction(1)), 0)


class TestIndependentChecks:
    @pytest.mark.parametrize("m", range(3))
    def test_quadrature_n2(self, table, m):
        ref = moment_quadrature(2, m)
        assert float(exact_moment(2, m, table)) == pytest.approx(ref, rel=1e-8)

    @pytest.mark.slow
    @pytest.mark.parametrize("n", range(1, 5))
    def test_monte_carlo(self, table, n):
        x = sample_voronoi_uniform(n, np.random.default_rng(1000 + n), size=1_000_000)
        sq = np.sum(x * x, axis=1)
        for m in range(4):
            vals = sq**m
            se = vals.std(ddof=1) / np.sqrt(len(vals))
            exact = float(exact_moment(n, m, table).coeff)  # M_n(m) / M_n(0)
            assert abs(vals.mean() - exact) <= 4 * se + 1e-15
