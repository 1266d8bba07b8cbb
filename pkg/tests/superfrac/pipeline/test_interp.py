"""Tests for superfrac.pipeline.interp: interpolants, derivative routes and error curves."""
import math

import numpy as np
import pytest

from superfrac.exceptions import DomainError
from superfrac.pipeline.base import ExperimentConfig
from superfrac.pipeline.interp import (
    InterpErrorExperiment,
    error_grid,
    frac_error_curve,
    gain_ratio,
    interpolate,
)
from superfrac.services.fracderiv import FracSpec, Kind
from superfrac.services.functions import INTERP_REGISTRY, parse_power_sum
from superfrac.services.orthopoly import NodeFamily, Side, node_family_points

EX31 = INTERP_REGISTRY['ex31']


def _cosine(x):
    return np.cos(2.0 * np.asarray(x))


# ── Interpolant ──────────────────────────────────────────────────────────────

class TestInterpolant:
    """Three representations of the same u_N."""

    @pytest.mark.parametrize('family', list(NodeFamily))
    def test_reproduces_nodes(self, family):
        u_N = interpolate(_cosine, family, 10)
        np.testing.assert_allclose(u_N.evaluate(u_N.nodes), _cosine(u_N.nodes), atol=1e-14)
        np.testing.assert_array_equal(u_N.nodes, node_family_points(family, 10))

    def test_scalar_evaluation(self):
        u_N = interpolate(_cosine, NodeFamily.LEGENDRE_GAUSS, 8)
        assert isinstance(u_N.evaluate(0.1), float)

    def test_power_form_agrees(self, interior_points):
        u_N = interpolate(_cosine, NodeFamily.LEGENDRE_LOBATTO, 9)
        np.testing.assert_allclose(u_N.power_form.evaluate(interior_points),
                                   u_N.evaluate(interior_points), atol=1e-13)

    @pytest.mark.parametrize('side', [Side.LEFT, Side.RIGHT])
    @pytest.mark.parametrize('kind', [Kind.RL, Kind.CAPUTO])
    def test_jacobi_route_matches_power_route(self, side, kind, interior_points):
        u_N = interpolate(_cosine, NodeFamily.LEGENDRE_GAUSS, 10)
        spec = FracSpec(0.45, side, kind)
        jacobi = u_N.frac_deriv(spec).evaluate(interior_points)
        power = u_N.frac_deriv_power_route(spec).evaluate(interior_points)
        scale = max(float(np.max(np.abs(power))), 1.0)
        assert float(np.max(np.abs(jacobi - power))) <= 1e-11 * scale

    def test_classical_order(self, interior_points):
        u_N = interpolate(_cosine, NodeFamily.LEGENDRE_GAUSS, 8)
        derivative = u_N.frac_deriv(FracSpec(1.0)).evaluate(interior_points)
        expected = u_N.power_form.x_derivative().evaluate(interior_points)
        np.testing.assert_allclose(derivative, expected, atol=1e-12)

    def test_too_small_N_raises(self):
        with pytest.raises(DomainError):
            interpolate(_cosine, NodeFamily.LEGENDRE_GAUSS, 0)


# ── Error curves ─────────────────────────────────────────────────────────────

class TestErrorCurves:
    """Global error against error at the superpoints."""

    def test_polynomial_is_reproduced(self):
        f = parse_power_sum('(1+x)^2 + 0.5*(1+x)^5')
        curve = frac_error_curve(f, None, NodeFamily.LEGENDRE_GAUSS, 12, FracSpec(0.5), grid_size=201)
        assert curve.global_max < 1e-10

    def test_gauss_rl_gain(self):
        curve = frac_error_curve(EX31, None, NodeFamily.LEGENDRE_GAUSS, 12, FracSpec(0.5), grid_size=501)
        assert curve.gain_ratio >= 5.0
        assert curve.superpoints.points.size == 13

    @pytest.mark.parametrize('family', [NodeFamily.LEGENDRE_GAUSS, NodeFamily.LEGENDRE_LOBATTO,
                                        NodeFamily.LEGENDRE_RADAU_LEFT])
    @pytest.mark.parametrize('mu', [0.1, 0.3, 0.5, 0.7, 0.9])
    def test_caputo_gain(self, family, mu):
        curve = frac_error_curve(EX31, None, family, 12, FracSpec(mu, Side.LEFT, Kind.CAPUTO))
        if math.isnan(curve.gain_ratio):
            assert list(curve.superpoints.points) == [-1.0]
        else:
            assert curve.gain_ratio >= 5.0

    def test_anchor_only_set_has_no_gain(self):
        curve = frac_error_curve(EX31, None, NodeFamily.LEGENDRE_GAUSS, 12, FracSpec(0.1, Side.LEFT, Kind.CAPUTO))
        assert list(curve.superpoints.points) == [-1.0]
        assert curve.max_at_superpoints == 0.0
        assert math.isnan(curve.gain_ratio)

    def test_lobatto_anchor_error_is_zero(self):
        curve = frac_error_curve(EX31, None, NodeFamily.LEGENDRE_LOBATTO, 12, FracSpec(0.5), grid_size=201)
        assert curve.superpoints.points[0] == -1.0
        assert curve.errors_at_superpoints[0] == 0.0
        assert curve.max_at_superpoints > 0.0

    def test_gauss_global_error_grows_with_order(self):
        maxima = [
            frac_error_curve(EX31, None, NodeFamily.LEGENDRE_GAUSS, 12, FracSpec(mu), grid_size=501).global_max
            for mu in (0.1, 0.5, 0.9)
        ]
        assert maxima == sorted(maxima)

    def test_explicit_exact_derivative(self):
        spec = FracSpec(0.3)
        curve = frac_error_curve(EX31, lambda x: EX31.frac_deriv(spec, x), NodeFamily.LEGENDRE_GAUSS,
                                 12, spec, grid_size=101)
        default = frac_error_curve(EX31, None, NodeFamily.LEGENDRE_GAUSS, 12, spec, grid_size=101)
        np.testing.assert_array_equal(curve.errors, default.errors)


class TestHelpers:
    """Grid and gain ratio."""

    def test_left_grid_is_guarded(self):
        grid = error_grid(Side.LEFT, 11, 1e-6)
        assert grid[0] == pytest.approx(-1.0 + 1e-6)
        assert grid[-1] == 1.0
        assert grid.size == 11

    def test_right_grid_is_guarded(self):
        grid = error_grid(Side.RIGHT, 11, 1e-6)
        assert grid[0] == -1.0
        assert grid[-1] == pytest.approx(1.0 - 1e-6)

    def test_gain_below_floor_is_one(self):
        assert gain_ratio(1e-13, 1e-14, 1e-11) == 1.0

    def test_gain_exact_at_points_is_inf(self):
        assert gain_ratio(1e-3, 0.0, 1e-11) == math.inf

    def test_gain_without_interior_points_is_nan(self):
        assert math.isnan(gain_ratio(1e-3, 0.0, 1e-11, interior=False))
        assert math.isnan(gain_ratio(1e-13, 0.0, 1e-11, interior=False))

    def test_gain(self):
        assert gain_ratio(1e-3, 1e-5, 1e-11) == pytest.approx(100.0)


# ── Command adapter ──────────────────────────────────────────────────────────

class TestInterpErrorExperiment:
    """Table and summary of the interp-error command."""

    def test_columns_and_summary(self):
        config = ExperimentConfig(command='interp-error', family='legendre-lobatto', n=8,
                                  orders=[0.3, 0.7], grid_size=51)
        result = InterpErrorExperiment().run(config)
        assert list(result.table.columns) == ['x', 'err_mu0.3', 'err_mu0.7']
        assert len(result.table) == 51
        assert result.summary['function'] == 'builtin:ex31'
        assert [o['order'] for o in result.summary['orders']] == [0.3, 0.7]
        assert len(result.summary['orders'][0]['superpoints']) == 9

    def test_right_side(self):
        config = ExperimentConfig(command='interp-error', family='legendre-gauss', n=6, orders=[0.5],
                                  side='right', function_id='(1-x)^3.5', grid_size=21)
        result = InterpErrorExperiment().run(config)
        assert result.table['x'].iloc[-1] == pytest.approx(1.0 - 1e-6)
        assert result.summary['side'] == 'right'
