"""Tests for superfrac.pipeline.pgsolver: GJF Petrov-Galerkin solves and diagnostics."""
import math
from unittest.mock import patch

import numpy as np
import pytest

from superfrac.exceptions import DomainError, IllConditionedSystemError
from superfrac.pipeline.base import ExperimentConfig
from superfrac.pipeline.experiment_config import get_deriv_n, get_pg_settings, get_validate_settings
from superfrac.pipeline.pgsolver import (
    FivpProblem,
    PgSolveExperiment,
    collocation_defect,
    convergence_table,
    eval_frac_deriv_solution,
    eval_solution,
    galerkin_residual,
    pg_error_curves,
    problem_for,
    reaction_matrix,
    solve_fivp,
    solve_fivp_left,
)
from superfrac.services.functions import RHS_REGISTRY, resolve_rhs
from superfrac.services.orthopoly import JacobiParam, Side, jacobi_eval

LEGENDRE = JacobiParam(0.0, 0.0)
GRID = np.linspace(-1.0, 1.0, 201)


def _legendre(m):
    return lambda x: jacobi_eval(LEGENDRE, m, x)


# ── Model problem ────────────────────────────────────────────────────────────

class TestFivpProblem:
    """Order range."""

    @pytest.mark.parametrize('s', [0.0, 1.0, -0.3])
    def test_order_outside_open_interval_raises(self, s):
        with pytest.raises(DomainError):
            FivpProblem(_legendre(0), s)

    def test_problem_for_builtin(self):
        problem = problem_for(RHS_REGISTRY['remark45'], 0.4, Side.RIGHT)
        assert problem.reaction
        assert problem.s == 0.4


# ── Diagonal solve ───────────────────────────────────────────────────────────

class TestSolveFivp:
    """f = L_m is solved exactly by a single GJF."""

    @pytest.mark.parametrize('m', [0, 3, 9])
    @pytest.mark.parametrize('s', [0.1, 0.55, 0.9])
    def test_legendre_rhs_gives_single_mode(self, m, s):
        e = solve_fivp(FivpProblem(_legendre(m), s), 9)
        expected = np.zeros(10)
        expected[m] = math.gamma(m + 1) / math.gamma(m + s + 1)
        np.testing.assert_allclose(e.coeffs, expected, atol=1e-13)

    def test_left_problem_has_same_coefficients(self):
        problem = FivpProblem(_legendre(3), 0.3)
        right = solve_fivp(problem, 6)
        left = solve_fivp_left(problem, 6)
        assert left.side is Side.LEFT
        np.testing.assert_allclose(left.coeffs, right.coeffs, atol=1e-15)

    @pytest.mark.parametrize('side', [Side.RIGHT, Side.LEFT])
    def test_derivative_reproduces_rhs(self, side):
        e = solve_fivp(FivpProblem(_legendre(3), 0.45, side), 7)
        np.testing.assert_allclose(eval_frac_deriv_solution(e, GRID), _legendre(3)(GRID), atol=1e-12)

    def test_matches_closed_form_solution(self):
        s = 0.35
        e = solve_fivp(FivpProblem(_legendre(3), s), 5)
        exact = resolve_rhs('legendre:3').exact_solution(s)
        np.testing.assert_allclose(eval_solution(e, GRID), exact(GRID), atol=1e-13)

    def test_anchor_value_is_zero(self):
        e = solve_fivp(FivpProblem(RHS_REGISTRY['ex41'].rhs(0.5), 0.5), 9)
        assert eval_solution(e, 1.0) == 0.0
        left = solve_fivp_left(FivpProblem(RHS_REGISTRY['ex41'].rhs(0.5), 0.5), 9)
        assert eval_solution(left, -1.0) == 0.0

    def test_galerkin_residual_vanishes(self):
        rhs = RHS_REGISTRY['ex42'].rhs(0.7)
        e = solve_fivp(FivpProblem(rhs, 0.7), 12)
        assert np.max(np.abs(galerkin_residual(e, rhs))) < 1e-12

    def test_wrong_scaling_is_detected(self):
        with patch('superfrac.pipeline.pgsolver._gjf_scaling', side_effect=lambda n, s: 1.0):
            e = solve_fivp(FivpProblem(_legendre(3), 0.5), 5)
        gap = np.max(np.abs(eval_frac_deriv_solution(e, GRID) - _legendre(3)(GRID)))
        assert gap > 1e-3

    def test_negative_N_raises(self):
        with pytest.raises(DomainError):
            solve_fivp(FivpProblem(_legendre(0), 0.5), -1)


# ── Reaction variant ─────────────────────────────────────────────────────────

class TestReaction:
    """D^s u + u = f with a dense system."""

    def test_exact_solution_in_trial_space(self):
        s = 0.55
        spec = RHS_REGISTRY['remark45']
        e = solve_fivp(problem_for(spec, s, Side.RIGHT), 12)
        assert e.reaction
        exact = spec.exact_solution(s)(GRID)
        gap = np.max(np.abs(eval_solution(e, GRID) - exact))
        assert gap <= 1e-10 * np.max(np.abs(exact))

    @pytest.mark.parametrize('s', [0.1, 0.3, 0.55, 0.7, 0.9])
    def test_value_superconvergence_at_default_N(self, s):
        spec = RHS_REGISTRY['remark45']
        pg = get_pg_settings()
        curves = pg_error_curves(problem_for(spec, s, Side.RIGHT), int(pg['value_n']), None,
                                 grid_size=int(pg['grid_size']), exact_solution=spec.exact_solution(s))
        assert curves.value.global_max > 0
        assert curves.value.max_at_superpoints <= float(pg['max_superpoint_ratio']) * curves.value.global_max

    def test_residual_vanishes(self):
        spec = RHS_REGISTRY['remark45']
        problem = problem_for(spec, 0.3, Side.RIGHT)
        e = solve_fivp(problem, 9)
        residual = galerkin_residual(e, problem.rhs)
        assert np.max(np.abs(residual)) <= 1e-10 * max(1.0, np.max(np.abs(e.coeffs)))

    def test_matrix_is_derivative_plus_mass(self):
        A = reaction_matrix(0.5, 4)
        assert A.shape == (5, 5)
        # (φ_0, L_0) = ∫ (1-x)^0.5 dx = 2^1.5 / 1.5
        eigen_0 = math.gamma(1.5) * 2.0
        assert A[0, 0] == pytest.approx(eigen_0 + 2.0 ** 1.5 / 1.5, rel=1e-13)

    def test_ill_conditioned_system_raises(self):
        spec = RHS_REGISTRY['remark45']
        with patch('superfrac.pipeline.pgsolver.get_pg_settings', return_value={'reaction_condition_limit': 1.0}):
            with pytest.raises(IllConditionedSystemError) as exc:
                solve_fivp(problem_for(spec, 0.5, Side.RIGHT), 6)
        assert exc.value.limit == 1.0


# ── Error curves ─────────────────────────────────────────────────────────────

class TestErrorCurves:
    """Superconvergence at the PG point sets."""

    @pytest.mark.parametrize('name', ['ex42', 'ex43'])
    @pytest.mark.parametrize('s', [0.3, 0.55, 0.9])
    def test_superconvergence_above_noise_floor(self, name, s):
        """Curves resolved to round-off carry no ratio; the rest beat the ratio limit."""
        pg = get_pg_settings()
        rhs = RHS_REGISTRY[name]
        curves = pg_error_curves(problem_for(rhs, s, Side.RIGHT), int(pg['value_n']),
                                 get_deriv_n(name, rhs.default_deriv_n), int(pg['ref_n']), int(pg['grid_size']))
        floor = float(get_validate_settings()['decay_floor'])
        checked = [c for c in (curves.value, curves.deriv) if c.global_max > floor]
        if name == 'ex43':
            assert curves.value.global_max > floor
        for curve in checked:
            assert curve.max_at_superpoints <= float(pg['max_superpoint_ratio']) * curve.global_max

    def test_value_only(self):
        problem = problem_for(RHS_REGISTRY['ex43'], 0.3, Side.RIGHT)
        curves = pg_error_curves(problem, 6, None, ref_n=30, grid_size=51)
        assert curves.deriv is None
        assert curves.value.superpoints.label == 'pg-value'

    def test_exact_solution_used(self):
        s = 0.4
        rhs = resolve_rhs('legendre:2')
        curves = pg_error_curves(problem_for(rhs, s, Side.RIGHT), 4, 4, grid_size=51,
                                 exact_solution=rhs.exact_solution(s))
        assert curves.value.global_max < 1e-13
        assert curves.deriv.global_max < 1e-13

    def test_convergence_table_decays(self):
        problem = problem_for(RHS_REGISTRY['ex41'], 0.55, Side.RIGHT)
        table = convergence_table(problem, [4, 8], ref_n=30, grid_size=201)
        assert list(table.columns) == ['N', 'value_error', 'deriv_error']
        assert table['value_error'].iloc[1] < table['value_error'].iloc[0]
        assert table['deriv_error'].iloc[1] < table['deriv_error'].iloc[0]

    def test_collocation_defect_small_at_gauss_points(self):
        rhs = RHS_REGISTRY['ex41'].rhs(0.5)
        e = solve_fivp(FivpProblem(rhs, 0.5), 9)
        defect = collocation_defect(e, rhs, grid_size=501)
        assert defect['at_gauss'] < defect['global']
        assert defect['ratio'] < 0.5


# ── Command adapter ──────────────────────────────────────────────────────────

class TestPgSolveExperiment:
    """Table and summary of the pg-solve command."""

    def test_legendre_rhs_is_exact(self):
        config = ExperimentConfig(command='pg-solve', function_id='legendre:3', n=5, orders=[0.5], grid_size=101)
        result = PgSolveExperiment().run(config)
        assert list(result.table.columns) == ['x', 'value_err_s0.5', 'deriv_err_s0.5']
        entry = result.summary['orders'][0]
        assert entry['deriv']['global_max'] < 1e-12
        assert entry['value']['global_max'] < 1e-12
        assert result.summary['reference'] == 'exact'

    def test_value_scheme_only(self):
        config = ExperimentConfig(command='pg-solve', scheme='pg-value', function_id='builtin:ex43',
                                  orders=[0.3], grid_size=51, ref_n=25)
        result = PgSolveExperiment().run(config)
        assert list(result.table.columns) == ['x', 'value_err_s0.3']
        assert result.summary['deriv_n'] is None
        assert result.summary['value_n'] == 9
        assert result.summary['reference'] == 'N=25'

    def test_deriv_n_from_settings(self):
        config = ExperimentConfig(command='pg-solve', scheme='pg-frac', function_id='ex42',
                                  orders=[0.7], grid_size=51, ref_n=30)
        result = PgSolveExperiment().run(config)
        assert result.summary['deriv_n'] == 18
        assert result.summary['value_n'] is None
