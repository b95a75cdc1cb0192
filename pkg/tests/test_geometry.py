import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from osmapinn import geometry as geo
from osmapinn import specfun as sf


def gram(grid, U):
    Y = sf.sph_harmonics_matrix(U, grid.theta, grid.phi)
    return (np.conj(Y).T * grid.weights) @ Y


class TestConversions:
    def test_north_pole(self):
        assert np.allclose(geo.sph_to_cart(1.0, 0.0, 2.2), (0, 0, 1))

    def test_plus_x(self):
        assert np.allclose(geo.sph_to_cart(1.0, np.pi / 2, 0.0), (1, 0, 0), atol=1e-16)

    def test_random_round_trip(self):
        rng = np.random.default_rng(7)
        r = rng.uniform(0.01, 3, 500)
        th = rng.uniform(1e-3, np.pi - 1e-3, 500)
        ph = rng.uniform(0, 2 * np.pi, 500)
        r2, th2, ph2 = geo.cart_to_sph(*geo.sph_to_cart(r, th, ph))
        assert np.allclose(r2, r, atol=1e-12, rtol=0)
        assert np.allclose(th2, th, atol=1e-12, rtol=0)
        assert np.allclose(ph2, ph, atol=1e-12, rtol=0)

    @given(x=st.floats(-5, 5), y=st.floats(-5, 5), z=st.floats(-5, 5))
    @settings(max_examples=200, deadline=None)
    def test_cartesian_round_trip(self, x, y, z):
        back = geo.sph_to_cart(*geo.cart_to_sph(x, y, z))
        assert np.allclose(back, (x, y, z), atol=1e-12)

    def test_azimuth_range(self):
        _, _, ph = geo.cart_to_sph(np.array([1.0, -1.0, 0.0]), np.array([-1e-3, 0.0, -1.0]), 0.0)
        assert np.all((ph >= 0) & (ph < 2 * np.pi))


class TestMakeGrid:
    @pytest.mark.parametrize("kind,n", [("gauss-legendre", 8), ("spherical-t-design", 36),
                                        ("spherical-t-design", 12), ("fibonacci", 500)])
    def test_weights_sum_to_four_pi(self, kind, n):
        assert make(kind, n).weights.sum() == pytest.approx(4 * np.pi, abs=1e-9)

    def test_fibonacci_equal_weights(self):
        g = geo.make_grid("fibonacci", 36, 0.05)
        assert len(g) == 36
        assert np.allclose(g.weights, 4 * np.pi / 36, rtol=0, atol=1e-15)

    @pytest.mark.parametrize("kind,n", [("gauss-legendre", 10), ("spherical-t-design", 36), ("fibonacci", 100)])
    def test_points_on_sphere(self, kind, n):
        g = make(kind, n, 0.05)
        r = np.linalg.norm(g.cartesian, axis=1)
        assert np.max(np.abs(r / 0.05 - 1)) < 1e-9

    def test_gauss_legendre_u4_gram(self):
        g = geo.make_grid("gauss-legendre", 8, 0.05)
        assert np.max(np.abs(gram(g, 4) - np.eye(25))) < 1e-10

    @pytest.mark.parametrize("degree", [2, 5, 9, 16])
    def test_gauss_legendre_exactness(self, degree):
        U = degree // 2
        g = geo.make_grid("gauss-legendre", degree, 1.0)
        assert np.max(np.abs(gram(g, U) - np.eye((U + 1) ** 2))) < 1e-10
        assert geo.quadrature_degree(g) == degree

    @pytest.mark.parametrize("n,t", [(6, 3), (12, 5), (36, 8)])
    def test_t_designs_integrate_to_their_strength(self, n, t):
        g = geo.make_grid("spherical-t-design", n, 1.0)
        # products Y_uv conj(Y_u'v') up to total degree t
        U = t // 2
        assert np.max(np.abs(gram(g, U) - np.eye((U + 1) ** 2))) < 1e-10
        Y = sf.sph_harmonics_matrix(t, g.theta, g.phi)
        moments = Y.T @ g.weights
        assert np.max(np.abs(moments[1:])) < 1e-10

    def test_unsupported_size_lists_catalog(self):
        with pytest.raises(ValueError, match="6, 12, 36"):
            geo.make_grid("spherical-t-design", 40, 0.05)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            geo.make_grid("lebedev", 50, 0.05)


class TestSphericalGrid:
    def test_bad_weights_rejected(self):
        with pytest.raises(ValueError):
            geo.SphericalGrid(1.0, [0.1, 0.2], [0.0, 1.0], [1.0, 1.0])

    def test_immutable(self):
        g = make("fibonacci", 20)
        with pytest.raises(ValueError):
            g.theta[0] = 1.0

    def test_json_round_trip(self):
        g = make("spherical-t-design", 36, 0.05)
        g2 = geo.SphericalGrid.from_json(g.to_json())
        assert g2.radius == g.radius
        assert np.array_equal(g2.theta, g.theta)
        assert np.array_equal(g2.weights, g.weights)

    def test_with_radius(self):
        g = make("fibonacci", 50, 0.05).with_radius(0.048)
        assert np.allclose(np.linalg.norm(g.cartesian, axis=1), 0.048)


def make(kind, n, r=1.0):
    return geo.make_grid(kind, n, r)
