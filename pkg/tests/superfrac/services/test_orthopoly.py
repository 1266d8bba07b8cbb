"""Tests for superfrac.services.orthopoly: Jacobi evaluation, shifted powers, Gauss-Jacobi, node families."""
import math

import mpmath
import numpy as np
import pytest
from numpy.polynomial import chebyshev, legendre
from scipy.special import eval_jacobi, roots_jacobi

from superfrac.config import MAX_POWER_DEGREE
from superfrac.exceptions import DegreeLimitError, DomainError
from superfrac.services.orthopoly import (
    JacobiParam,
    JacobiSeries,
    NodeFamily,
    PowerBasisPoly,
    Side,
    chebyshev_power_coeffs,
    chebyshev_vandermonde,
    gauss_jacobi_rule,
    jacobi_deriv_eval,
    jacobi_eval,
    jacobi_power_coeffs,
    jacobi_power_coeffs_explicit,
    jacobi_roots,
    jacobi_vandermonde,
    legendre_expand,
    node_family_points,
    node_poly_eval,
    node_poly_power,
)
from superfrac.services.specialfn import jacobi_mass

PARAMS = [(0.0, 0.0), (0.5, -0.5), (-0.5, 0.5), (0.3, 1.7), (-0.9, 0.2), (0.7, 0.0)]
# weights of the Legendre, GJF and asymmetric test systems
WEIGHT_PARAMS = [(0.0, 0.0), (0.3, -0.3), (-0.5, 0.7)]


def _mp_jacobi(n, alpha, beta, x):
    """Reference values from mpmath's hypergeometric Jacobi function."""
    return np.array([float(mpmath.jacobi(n, alpha, beta, xi)) for xi in x])


# ── Side ─────────────────────────────────────────────────────────────────────

class TestSide:
    """Anchors and distances."""

    def test_anchor_points(self):
        assert Side.LEFT.anchor_point == -1.0
        assert Side.RIGHT.anchor_point == 1.0

    def test_mirror(self):
        assert Side.LEFT.mirror is Side.RIGHT
        assert Side.RIGHT.mirror is Side.LEFT

    def test_distance(self):
        assert Side.LEFT.distance(0.25) == 1.25
        assert Side.RIGHT.distance(0.25) == 0.75


# ── Jacobi evaluation ────────────────────────────────────────────────────────

class TestJacobiEval:
    """Three-term recurrence against scipy's hypergeometric evaluation."""

    @pytest.mark.parametrize('alpha,beta', PARAMS)
    def test_matches_scipy(self, alpha, beta, interior_points):
        for n in range(0, 14):
            ours = jacobi_eval(JacobiParam(alpha, beta), n, interior_points)
            ref = eval_jacobi(n, alpha, beta, interior_points)
            np.testing.assert_allclose(ours, ref, rtol=1e-11, atol=1e-12)

    def test_value_at_one(self):
        """P_n^{(α,β)}(1) = (α+1)_n / n!."""
        alpha, n = 0.3, 6
        expected = math.gamma(alpha + n + 1) / (math.gamma(alpha + 1) * math.factorial(n))
        assert jacobi_eval(JacobiParam(alpha, 1.1), n, 1.0) == pytest.approx(expected, rel=1e-13)

    def test_scalar_in_scalar_out(self):
        value = jacobi_eval(JacobiParam(0.0, 0.0), 2, 0.5)
        assert isinstance(value, float)
        assert value == pytest.approx(-0.125)

    def test_degenerate_recurrence_uses_explicit_sum(self, interior_points):
        """α+β = -2 breaks the recurrence denominators."""
        p = JacobiParam(-0.3, -1.7)
        for n in range(0, 6):
            ref = _mp_jacobi(n, p.alpha, p.beta, interior_points)
            np.testing.assert_allclose(jacobi_eval(p, n, interior_points), ref, rtol=1e-10, atol=1e-12)

    @pytest.mark.parametrize('alpha,beta', WEIGHT_PARAMS)
    def test_reflection(self, alpha, beta, rng):
        """P_n^{(α,β)}(-x) = (-1)^n P_n^{(β,α)}(x)."""
        x = rng.uniform(-1.0, 1.0, 100)
        for n in range(0, 13):
            np.testing.assert_allclose(jacobi_eval(JacobiParam(alpha, beta), n, -x),
                                       (-1) ** n * jacobi_eval(JacobiParam(beta, alpha), n, x),
                                       rtol=0, atol=1e-12)

    def test_vandermonde_shape(self):
        V = jacobi_vandermonde(JacobiParam(0.0, 0.0), 4, np.linspace(-1, 1, 7))
        assert V.shape == (7, 5)

    def test_negative_degree_raises(self):
        with pytest.raises(DomainError):
            jacobi_eval(JacobiParam(0.0, 0.0), -1, 0.0)

    def test_derivative_matches_numpy_legendre(self, interior_points):
        for n in range(0, 10):
            ref = legendre.Legendre.basis(n).deriv()(interior_points)
            ours = np.atleast_1d(jacobi_deriv_eval(JacobiParam(0.0, 0.0), n, interior_points))
            np.testing.assert_allclose(ours, ref, rtol=1e-12, atol=1e-12)


class TestOrthogonality:
    """Gauss-Jacobi quadrature of P_n P_m against the Jacobi weight."""

    @staticmethod
    def _inner(alpha, beta, n, m):
        p = JacobiParam(alpha, beta)
        rule = gauss_jacobi_rule(p, max(2 * max(n, m), 1))
        return rule.integrate(lambda x: jacobi_eval(p, n, x) * jacobi_eval(p, m, x))

    @pytest.mark.parametrize('alpha,beta', WEIGHT_PARAMS)
    def test_distinct_degrees_are_orthogonal(self, alpha, beta):
        for n in range(0, 11):
            for m in range(0, n):
                assert abs(self._inner(alpha, beta, n, m)) <= 1e-12

    @pytest.mark.parametrize('alpha,beta', WEIGHT_PARAMS)
    def test_degree_zero_norm_is_mass(self, alpha, beta):
        assert self._inner(alpha, beta, 0, 0) == pytest.approx(jacobi_mass(alpha, beta), rel=1e-13)

    @pytest.mark.parametrize('alpha,beta', WEIGHT_PARAMS)
    def test_norms(self, alpha, beta):
        for n in (1, 4, 9):
            expected = (jacobi_mass(alpha, beta) * mpmath.rf(alpha + 1, n) * mpmath.rf(beta + 1, n)
                        * (alpha + beta + 1) / (mpmath.rf(alpha + beta + 1, n) * mpmath.factorial(n)
                                                * (2 * n + alpha + beta + 1)))
            assert self._inner(alpha, beta, n, n) == pytest.approx(float(expected), rel=1e-12)


class TestJacobiSeries:
    """Σ c_n P_n^{(α,β)}."""

    def test_reflected_is_value_at_minus_x(self, interior_points):
        series = JacobiSeries(JacobiParam(0.4, -0.6), (1.0, -2.0, 0.5, 3.0))
        np.testing.assert_allclose(series.reflected().evaluate(interior_points),
                                   series.evaluate(-interior_points), rtol=1e-12, atol=1e-12)

    def test_constant_shift(self, interior_points):
        series = JacobiSeries(JacobiParam(0.5, -0.5), (0.0, 1.0))
        shifted = series.with_constant_shift(2.5)
        np.testing.assert_allclose(shifted.evaluate(interior_points) - series.evaluate(interior_points), 2.5)

    def test_monomial_and_single_term(self):
        series = JacobiSeries.monomial(JacobiParam(0.0, 0.0), 3, 2.0)
        assert series.coeffs == (0.0, 0.0, 0.0, 2.0)
        assert series.single_term() == 3
        assert series.degree == 3
        assert JacobiSeries(JacobiParam(0.0, 0.0), (1.0, 1.0)).single_term() is None

    def test_scaled(self):
        series = JacobiSeries(JacobiParam(0.0, 0.0), (1.0, 2.0)).scaled(-3.0)
        assert series.coeffs == (-3.0, -6.0)


class TestChebyshev:
    """Chebyshev T and U by their own recurrence."""

    def test_first_kind_matches_numpy(self, interior_points):
        V = chebyshev_vandermonde(8, interior_points)
        for k in range(9):
            np.testing.assert_allclose(V[:, k], chebyshev.Chebyshev.basis(k)(interior_points), atol=1e-13)

    def test_second_kind_at_one(self):
        """U_k(1) = k+1."""
        V = chebyshev_vandermonde(6, 1.0, second_kind=True)
        np.testing.assert_allclose(V[0], np.arange(1, 8))


# ── Shifted power basis ──────────────────────────────────────────────────────

class TestShiftedPowers:
    """Jacobi and Chebyshev polynomials in powers of (1±x), extended precision."""

    def test_legendre_two_about_left(self):
        """L_2 = 1 - 3t + 1.5 t² with t = 1+x."""
        poly = jacobi_power_coeffs(JacobiParam(0.0, 0.0), 2, Side.LEFT)
        assert poly.to_floats() == pytest.approx([1.0, -3.0, 1.5], abs=1e-30)

    @pytest.mark.parametrize('alpha,beta', PARAMS)
    @pytest.mark.parametrize('anchor', [Side.LEFT, Side.RIGHT])
    def test_power_form_matches_evaluation(self, alpha, beta, anchor, interior_points):
        p = JacobiParam(alpha, beta)
        for n in (0, 1, 5, 12, 20):
            poly = jacobi_power_coeffs(p, n, anchor)
            np.testing.assert_allclose(poly.evaluate(interior_points), jacobi_eval(p, n, interior_points),
                                       rtol=1e-10, atol=1e-10)

    @pytest.mark.parametrize('anchor', [Side.LEFT, Side.RIGHT])
    def test_recurrence_matches_explicit_sum(self, anchor):
        p = JacobiParam(0.55, -0.55)
        recurrence = jacobi_power_coeffs(p, 15, anchor)
        explicit = jacobi_power_coeffs_explicit(p, 15, anchor)
        for a, b in zip(recurrence.coeffs, explicit.coeffs):
            assert abs(a - b) <= 1e-30 * max(1, abs(b))

    def test_degenerate_parameters_fall_back_to_explicit(self, interior_points):
        p = JacobiParam(-0.3, -1.7)
        poly = jacobi_power_coeffs(p, 4, Side.RIGHT)
        np.testing.assert_allclose(poly.evaluate(interior_points), _mp_jacobi(4, -0.3, -1.7, interior_points),
                                   rtol=1e-10, atol=1e-12)

    @pytest.mark.parametrize('anchor', [Side.LEFT, Side.RIGHT])
    def test_chebyshev_power_form(self, anchor, interior_points):
        for n in (0, 1, 7, 13):
            poly = chebyshev_power_coeffs(n, anchor)
            np.testing.assert_allclose(poly.evaluate(interior_points),
                                       chebyshev.Chebyshev.basis(n)(interior_points), atol=1e-11)

    def test_degree_guard(self):
        with pytest.raises(DegreeLimitError) as exc:
            jacobi_power_coeffs(JacobiParam(0.0, 0.0), MAX_POWER_DEGREE + 1, Side.LEFT)
        assert exc.value.limit == MAX_POWER_DEGREE

    def test_x_derivative(self, interior_points):
        for anchor in Side:
            poly = jacobi_power_coeffs(JacobiParam(0.0, 0.0), 6, anchor)
            ref = legendre.Legendre.basis(6).deriv()(interior_points)
            np.testing.assert_allclose(poly.x_derivative().evaluate(interior_points), ref, atol=1e-11)

    def test_reflected_is_value_at_minus_x(self, interior_points):
        poly = PowerBasisPoly.from_floats(Side.LEFT, [1.0, -2.0, 0.5])
        np.testing.assert_allclose(poly.reflected().evaluate(interior_points), poly.evaluate(-interior_points))

    def test_addition_requires_same_anchor(self):
        left = PowerBasisPoly.from_floats(Side.LEFT, [1.0])
        right = PowerBasisPoly.from_floats(Side.RIGHT, [1.0])
        with pytest.raises(DomainError):
            left + right

    def test_addition_drops_cancelled_top_terms(self):
        a = PowerBasisPoly.from_floats(Side.LEFT, [1.0, 2.0, 3.0])
        b = PowerBasisPoly.from_floats(Side.LEFT, [0.0, 0.0, -3.0])
        assert (a + b).degree == 1


# ── Gauss-Jacobi quadrature ──────────────────────────────────────────────────

class TestGaussJacobi:
    """Golub-Welsch rules."""

    def test_two_point_legendre(self):
        rule = gauss_jacobi_rule(JacobiParam(0.0, 0.0), 2)
        np.testing.assert_allclose(rule.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], rtol=1e-15)
        np.testing.assert_allclose(rule.weights, [1.0, 1.0], rtol=1e-14)

    @pytest.mark.parametrize('alpha,beta', PARAMS)
    def test_matches_scipy_roots_jacobi(self, alpha, beta):
        for n in (3, 10, 40):
            rule = gauss_jacobi_rule(JacobiParam(alpha, beta), n)
            nodes, weights = roots_jacobi(n, alpha, beta)
            np.testing.assert_allclose(rule.nodes, nodes, atol=1e-13)
            np.testing.assert_allclose(rule.weights, weights, rtol=1e-10, atol=1e-15)

    @pytest.mark.parametrize('alpha,beta', PARAMS)
    def test_weights_sum_to_mass(self, alpha, beta):
        rule = gauss_jacobi_rule(JacobiParam(alpha, beta), 12)
        assert rule.weights.sum() == pytest.approx(jacobi_mass(alpha, beta), rel=1e-13)

    def test_exact_for_degree_2n_minus_1(self):
        """∫ x^6 over [-1, 1] = 2/7 with four Legendre points."""
        rule = gauss_jacobi_rule(JacobiParam(0.0, 0.0), 4)
        assert rule.integrate(lambda x: x ** 7 + x ** 6) == pytest.approx(2.0 / 7.0, rel=1e-14)

    def test_single_point_rule(self):
        rule = gauss_jacobi_rule(JacobiParam(0.5, 0.0), 1)
        assert rule.nodes[0] == pytest.approx(-0.5 / 2.5)
        assert rule.weights[0] == pytest.approx(jacobi_mass(0.5, 0.0))

    def test_non_integrable_weight_raises(self):
        with pytest.raises(DomainError):
            gauss_jacobi_rule(JacobiParam(-1.0, 0.0), 4)

    def test_zero_points_raises(self):
        with pytest.raises(DomainError):
            gauss_jacobi_rule(JacobiParam(0.0, 0.0), 0)


class TestJacobiRoots:
    """Zeros by Golub-Welsch and by Newton with deflation."""

    @pytest.mark.parametrize('alpha,beta', [(0.5, -0.5), (0.1, -0.1), (0.9, -0.9), (0.3, 0.7)])
    def test_methods_agree(self, alpha, beta):
        p = JacobiParam(alpha, beta)
        for n in (1, 5, 13):
            np.testing.assert_allclose(jacobi_roots(p, n, method='newton'), jacobi_roots(p, n), atol=1e-12)

    def test_roots_are_zeros(self):
        p = JacobiParam(0.55, -0.55)
        roots = jacobi_roots(p, 10)
        assert np.max(np.abs(jacobi_eval(p, 10, roots))) < 1e-11

    def test_degree_zero_has_no_roots(self):
        assert jacobi_roots(JacobiParam(0.0, 0.0), 0).size == 0

    def test_unknown_method_raises(self):
        with pytest.raises(DomainError):
            jacobi_roots(JacobiParam(0.0, 0.0), 3, method='bisection')


# ── Node families ────────────────────────────────────────────────────────────

class TestNodeFamilies:
    """The eight collocation node sets and their node polynomials."""

    def test_family_attributes(self):
        f = NodeFamily.LEGENDRE_RADAU_LEFT
        assert f.basis == 'legendre'
        assert f.kind == 'radau-left'
        assert f.is_legendre
        assert f.mirror is NodeFamily.LEGENDRE_RADAU_RIGHT
        assert NodeFamily.CHEBYSHEV_GAUSS.mirror is NodeFamily.CHEBYSHEV_GAUSS

    def test_vanishes_at(self):
        assert NodeFamily.LEGENDRE_LOBATTO.vanishes_at(Side.LEFT)
        assert NodeFamily.LEGENDRE_RADAU_LEFT.vanishes_at(Side.LEFT)
        assert not NodeFamily.LEGENDRE_RADAU_LEFT.vanishes_at(Side.RIGHT)
        assert not NodeFamily.LEGENDRE_GAUSS.vanishes_at(Side.LEFT)

    @pytest.mark.parametrize('family', list(NodeFamily))
    def test_points_are_zeros_of_node_polynomial(self, family):
        N = 12
        points = node_family_points(family, N)
        assert points.size == N + 1
        assert np.all(np.diff(points) > 0)
        assert np.max(np.abs(node_poly_eval(family, N, points))) < 1e-11

    def test_endpoints(self):
        lobatto = node_family_points(NodeFamily.LEGENDRE_LOBATTO, 6)
        assert lobatto[0] == -1.0 and lobatto[-1] == 1.0
        assert node_family_points(NodeFamily.CHEBYSHEV_RADAU_LEFT, 6)[0] == -1.0
        assert node_family_points(NodeFamily.CHEBYSHEV_RADAU_RIGHT, 6)[-1] == 1.0
        gauss = node_family_points(NodeFamily.LEGENDRE_GAUSS, 6)
        assert -1.0 < gauss[0] and gauss[-1] < 1.0

    def test_chebyshev_gauss_closed_form(self):
        N = 7
        j = np.arange(N + 1)
        expected = np.sort(np.cos((2 * j + 1) * np.pi / (2 * N + 2)))
        np.testing.assert_allclose(node_family_points(NodeFamily.CHEBYSHEV_GAUSS, N), expected)

    @pytest.mark.parametrize('family', list(NodeFamily))
    @pytest.mark.parametrize('anchor', [Side.LEFT, Side.RIGHT])
    def test_power_form_matches_evaluation(self, family, anchor, interior_points):
        poly = node_poly_power(family, 9, anchor)
        np.testing.assert_allclose(poly.evaluate(interior_points), node_poly_eval(family, 9, interior_points),
                                   atol=1e-11)

    def test_chebyshev_derivative(self, interior_points):
        ref = chebyshev.Chebyshev([0, 0, 0, 0, 0, 1, 1]).deriv()(interior_points)
        ours = node_poly_eval(NodeFamily.CHEBYSHEV_RADAU_LEFT, 5, interior_points, derivative=True)
        np.testing.assert_allclose(ours, ref, atol=1e-11)

    def test_too_small_N_raises(self):
        with pytest.raises(DomainError):
            node_family_points(NodeFamily.LEGENDRE_GAUSS, 0)


class TestLegendreExpand:
    """Legendre projection by Gauss-Legendre quadrature."""

    def test_legendre_polynomial_is_a_unit_vector(self):
        coeffs = legendre_expand(lambda x: jacobi_eval(JacobiParam(0.0, 0.0), 3, x), 6, 20)
        expected = np.zeros(7)
        expected[3] = 1.0
        np.testing.assert_allclose(coeffs, expected, atol=1e-14)

    def test_constant_function(self):
        coeffs = legendre_expand(lambda x: 2.0, 3, 8)
        np.testing.assert_allclose(coeffs, [2.0, 0.0, 0.0, 0.0], atol=1e-14)

    def test_too_few_points_raises(self):
        with pytest.raises(DomainError):
            legendre_expand(np.sin, 10, 5)
