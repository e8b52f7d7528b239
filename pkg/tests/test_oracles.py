import numpy as np
import pytest

from anvm.errors import DomainError
from anvm.oracles import brute_force_nearest, f_quadrature, lattice_points_within, moment_quadrature


class TestCubeQuadrature:
    def test_constant(self):
        assert f_quadrature(3, 0, 0) == pytest.approx(1.0, abs=1e-14)

    def test_square_of_sum(self):
        assert f_quadrature(2, 0, 2) == pytest.approx(7 / 6, rel=1e-14)

    def test_partial_cube(self):
        # int_0^t x^2 dx = t^3 / 3
        assert f_quadrature(1, 1, 0, 0.5) == pytest.approx(0.125 / 3, rel=1e-14)

    @pytest.mark.parametrize("args", [(0, 1, 1), (5, 0, 0), (2, -1, 0), (2, 0, 0, 1.5)])
    def test_domain(self, args):
        with pytest.raises(DomainError):
            f_quadrature(*args)


class TestCellQuadrature:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_volume(self, n):
        assert moment_quadrature(n, 0) == pytest.approx(np.sqrt(n + 1), rel=1e-10)

    def test_segment_second_moment(self):
        assert moment_quadrature(1, 1) == pytest.approx(np.sqrt(2) / 6, rel=1e-10)

    def test_hexagon_second_moment(self):
        assert moment_quadrature(2, 1) == pytest.approx(5 * np.sqrt(3) / 18, rel=1e-10)

    def test_explicit_integrand(self):
        ref = moment_quadrature(3, 2)
        assert moment_quadrature(3, 0, f=lambda p: np.sum(p * p, axis=-1) ** 2) == pytest.approx(ref, rel=1e-13)

    @pytest.mark.parametrize("n,m", [(4, 0), (2, 4)])
    def test_domain(self, n, m):
        with pytest.raises(DomainError):
            moment_quadrature(n, m)


class TestEnumeration:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_minimal_vector_count(self, n):
        pts = lattice_points_within(n, np.sqrt(2))
        norms = np.sum(pts * pts, axis=1)
        assert np.count_nonzero(norms == 2) == n * (n + 1)
        assert np.count_nonzero(norms == 0) == 1

    def test_sorted_and_on_plane(self):
        pts = lattice_points_within(3, 2.0)
        assert np.all(pts.sum(axis=1) == 0)
        assert [tuple(p) for p in pts] == sorted(tuple(p) for p in pts)

    def test_nearest_origin(self):
        assert list(brute_force_nearest(np.array([0.1, -0.05, -0.05]), 2.0)) == [0, 0, 0]

    def test_nearest_batch(self):
        y = np.array([[0.9, -0.8, -0.1], [-0.1, 0.05, 0.05]])
        np.testing.assert_array_equal(brute_force_nearest(y, 2.0), [[1, -1, 0], [0, 0, 0]])

    def test_domain(self):
        with pytest.raises(DomainError):
            lattice_points_within(0, 1.0)
        with pytest.raises(DomainError):
            lattice_points_within(2, -1.0)
