"""
Self-checks behind `superfrac validate`.

Each suite recomputes a known identity or a published qualitative result and
compares one worst-case number against a limit from the `validate` section of
the settings. A suite that raises counts as failed; the rest still run.
"""
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from superfrac.exceptions import SuperfracError
from superfrac.pipeline.base import ExperimentAdapter, ExperimentConfig, ExperimentResult
from superfrac.pipeline.experiment_config import (
    get_deriv_n,
    get_interp_settings,
    get_oracle_settings,
    get_pg_settings,
    get_superpoint_settings,
    get_validate_settings,
)
from superfrac.pipeline.interp import frac_error_curve, interpolate
from superfrac.pipeline.pgsolver import (
    FivpProblem,
    collocation_defect,
    convergence_table,
    eval_frac_deriv_solution,
    eval_solution,
    galerkin_residual,
    pg_error_curves,
    problem_for,
    solve_fivp,
)
from superfrac.pipeline.quad import moment_errors
from superfrac.pipeline.superpoints import factor_residuals, generating_function, interp_superpoints
from superfrac.services.fracderiv import (
    FracSpec,
    Kind,
    closed_form_available,
    frac_deriv_node_poly,
    frac_deriv_node_poly_power,
    frac_deriv_power,
    frac_deriv_singular,
    frac_integral_power,
    node_poly_function,
    oracle_frac_deriv,
)
from superfrac.services.functions import RHS_REGISTRY, resolve_interp_function
from superfrac.services.orthopoly import (
    JacobiParam,
    NodeFamily,
    Side,
    gauss_jacobi_rule,
    jacobi_eval,
    node_poly_eval,
    node_poly_power,
    node_poly_terms,
)
from superfrac.services.specialfn import gamma_ratio

logger = logging.getLogger('pipeline.validation')

LEGENDRE_FAMILIES = [f for f in NodeFamily if f.is_legendre]
# Families whose superpoints on the left are compared with the classical limit
LEFT_FAMILIES = [NodeFamily.LEGENDRE_GAUSS, NodeFamily.LEGENDRE_LOBATTO, NodeFamily.LEGENDRE_RADAU_LEFT]

_QUAD_PARAMS = [(0.0, 0.0), (-0.5, 0.0), (0.3, -0.3), (-0.5, 0.7), (1.0, 1.0)]
_QUAD_SIZES = [1, 2, 3, 5, 8, 16]
_EXACTNESS_DEGREES = [0, 3, 9]


@dataclass
class SuiteResult:
    name: str
    passed: bool
    worst: float
    limit: float
    detail: Dict[str, Any] = field(default_factory=dict)


def _native_side(family: NodeFamily) -> Side:
    return Side.LEFT if closed_form_available(family, Side.LEFT) else Side.RIGHT


def _sample_points(settings, low: float = -1.0 + 1e-3, high: float = 1.0 - 1e-3) -> np.ndarray:
    rng = np.random.default_rng(int(settings['seed']))
    return np.sort(rng.uniform(low, high, int(settings['oracle_samples'])))


def _relative_gap(reference: np.ndarray, other: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(reference))), 1.0)
    return float(np.max(np.abs(np.asarray(reference) - np.asarray(other)))) / scale


# ── Suites ───────────────────────────────────────────────────────────────────

def check_quadrature(settings) -> SuiteResult:
    """Gauss-Jacobi rules integrate x^j exactly for j <= 2n-1."""
    limit = float(settings['quad_tol'])
    worst = 0.0
    for alpha, beta in _QUAD_PARAMS:
        for n in _QUAD_SIZES:
            rule = gauss_jacobi_rule(JacobiParam(alpha, beta), n)
            worst = max(worst, max(moment_errors(rule, 2 * n - 1)))
    return SuiteResult('quadrature', worst <= limit, worst, limit,
                       {'params': _QUAD_PARAMS, 'sizes': _QUAD_SIZES})


def check_oracle(settings) -> SuiteResult:
    """
    Closed form, shifted-power route and quadrature oracle agree on D^μ w_{N+1},
    and D^μ I^μ w_{N+1} gives w_{N+1} back.
    """
    limit = float(settings['oracle_rtol'])
    oracle_settings = get_oracle_settings()
    points = int(oracle_settings['points'])
    min_distance = float(oracle_settings['min_anchor_distance'])
    x = _sample_points(settings)
    worst = 0.0
    inverse_gap = 0.0
    cases = 0
    for family in LEGENDRE_FAMILIES:
        side = _native_side(family)
        for N in settings['oracle_n']:
            smooth = node_poly_function(family, int(N))
            start = float(node_poly_eval(family, int(N), side.anchor_point))
            poly = node_poly_power(family, int(N), side)
            values = np.atleast_1d(poly.evaluate(x))
            for order in settings['oracle_orders']:
                integral = frac_integral_power(poly, float(order), side)
                restored = frac_deriv_singular(integral, FracSpec(float(order), side))
                inverse_gap = max(inverse_gap, _relative_gap(values, np.atleast_1d(restored.evaluate(x))))
                for kind in Kind:
                    spec = FracSpec(float(order), side, kind)
                    closed = np.atleast_1d(frac_deriv_node_poly(family, int(N), spec).evaluate(x))
                    power = np.atleast_1d(frac_deriv_node_poly_power(family, int(N), spec).evaluate(x))
                    oracle = np.atleast_1d(oracle_frac_deriv(smooth, start, spec, x, points, min_distance))
                    worst = max(worst, _relative_gap(closed, power), _relative_gap(closed, oracle))
                    cases += 1
    worst = max(worst, inverse_gap)
    return SuiteResult('oracle', worst <= limit, worst, limit,
                       {'cases': cases, 'samples': x.size, 'inverse_gap': inverse_gap})


def _classical_zeros(family: NodeFamily, N: int) -> np.ndarray:
    """Zeros of w'_{N+1} inside (-1, 1), from numpy's Legendre class."""
    coeffs = np.zeros(N + 2)
    for coef, deg in node_poly_terms(family, N):
        coeffs[deg] += coef
    roots = np.polynomial.legendre.Legendre(coeffs).deriv().roots()
    real = np.real(roots[np.abs(np.imag(roots)) < 1e-10])
    return np.sort(real[(real > -1.0) & (real < 1.0)])


def check_classical_limit(settings) -> SuiteResult:
    """
    μ = 1 reproduces the ordinary derivative, and superpoints at μ -> 1 sit
    on the zeros of w'_{N+1}.
    """
    limit = float(settings['continuity_tol'])
    N = int(settings['superpoint_n'])
    x = _sample_points(settings)
    derivative_gap = 0.0
    for family in LEGENDRE_FAMILIES:
        poly = node_poly_power(family, N, Side.LEFT)
        classical = frac_deriv_power(poly, FracSpec(1.0))
        derivative_gap = max(derivative_gap, _relative_gap(poly.x_derivative().evaluate(x),
                                                           np.atleast_1d(classical.evaluate(x))))

    order = float(settings['continuity_order'])
    continuity_gap = 0.0
    for family in LEFT_FAMILIES:
        points = interp_superpoints(family, N, FracSpec(order)).points
        for z in _classical_zeros(family, N):
            continuity_gap = max(continuity_gap, float(np.min(np.abs(points - z))))

    passed = continuity_gap <= limit and derivative_gap <= float(settings['oracle_rtol'])
    return SuiteResult('classical-limit', passed, continuity_gap, limit,
                       {'derivative_gap': derivative_gap, 'order': order})


def check_superpoints(settings) -> SuiteResult:
    """Superpoints are zeros of D^μ w_{N+1}; RL Legendre sets have N+1 of them."""
    limit = float(get_superpoint_settings()['residual_tol'])
    N = int(settings['superpoint_n'])
    worst = 0.0
    bad_counts = []
    counts = {}
    for family in LEFT_FAMILIES + [NodeFamily.CHEBYSHEV_GAUSS]:
        for order in settings['oracle_orders']:
            for kind in Kind:
                spec = FracSpec(float(order), Side.LEFT, kind)
                sps = interp_superpoints(family, N, spec)
                residuals = factor_residuals(generating_function(family, N, spec), sps.points)
                worst = max(worst, float(np.max(residuals)) if residuals.size else 0.0)
                counts[f"{family.value}/{kind.value}/{order}"] = len(sps)
                if family.is_legendre and kind is Kind.RL and len(sps) != N + 1:
                    bad_counts.append(f"{family.value}@{order}")
    return SuiteResult('superpoints', worst <= limit and not bad_counts, worst, limit,
                       {'bad_counts': bad_counts, 'counts': counts})


def check_mirror(settings) -> SuiteResult:
    """Right-sided closed forms (by reflection) match the right-anchored power route."""
    limit = float(settings['oracle_rtol'])
    N = int(settings['mirror_n'])
    x = _sample_points(settings)
    worst = 0.0
    point_gap = 0.0
    for family in LEGENDRE_FAMILIES:
        if not closed_form_available(family, Side.RIGHT):
            continue
        for order in settings['oracle_orders']:
            spec = FracSpec(float(order), Side.RIGHT)
            closed = np.atleast_1d(frac_deriv_node_poly(family, N, spec).evaluate(x))
            power = np.atleast_1d(frac_deriv_node_poly_power(family, N, spec).evaluate(x))
            worst = max(worst, _relative_gap(closed, power))
            right = interp_superpoints(family, N, spec).points
            left = interp_superpoints(family.mirror, N, spec.mirrored()).points
            point_gap = max(point_gap, float(np.max(np.abs(right + left[::-1]))))
    passed = worst <= limit and point_gap <= 1e-12
    return SuiteResult('mirror', passed, worst, limit, {'point_gap': point_gap})


def check_interp_gain(settings) -> SuiteResult:
    """
    Superpoint gain on the smooth benchmark: every Legendre family beats the
    minimum gain for both RL and Caputo, and the RL Gauss global error grows
    with μ. Sets without an interior point (NaN gain) are listed, not gated.
    """
    interp = get_interp_settings()
    limit = float(interp['min_gain_ratio'])
    f = resolve_interp_function(interp['function'])
    N = int(interp['n'])
    orders = [float(o) for o in interp['orders']]
    worst = float('inf')
    gains: Dict[str, float] = {}
    gauss_max: List[float] = []
    not_applicable: List[str] = []
    for family in LEFT_FAMILIES:
        u_N = interpolate(f, family, N)
        for kind in Kind:
            for order in orders:
                curve = frac_error_curve(f, None, family, N, FracSpec(order, Side.LEFT, kind), interpolant=u_N)
                key = f"{family.value}/{kind.value}/{order:g}"
                gains[key] = curve.gain_ratio
                if math.isnan(curve.gain_ratio):
                    not_applicable.append(key)
                else:
                    worst = min(worst, curve.gain_ratio)
                if kind is Kind.RL and family is NodeFamily.LEGENDRE_GAUSS:
                    gauss_max.append(curve.global_max)
    monotone = all(b >= a for a, b in zip(gauss_max, gauss_max[1:]))
    return SuiteResult('interp-gain', worst >= limit and monotone, worst, limit,
                       {'gains': gains, 'gauss_global_max': gauss_max, 'monotone': monotone,
                        'not_applicable': not_applicable})


def check_pg_exactness(settings) -> SuiteResult:
    """f = L_m gives ũ = δ_nm m!/Γ(m+s+1) and D^s u_N = L_m, both anchors."""
    limit = float(settings['exactness_tol'])
    reproduce_limit = float(settings['reproduce_tol'])
    N = int(get_pg_settings()['value_n'])
    grid = np.linspace(-1.0, 1.0, 1001)
    coefficient_gap = 0.0
    reproduce_gap = 0.0
    for s in get_pg_settings()['orders']:
        s = float(s)
        for m in _EXACTNESS_DEGREES:
            rhs = (lambda m_: lambda x: jacobi_eval(JacobiParam(0.0, 0.0), m_, x))(m)
            expected = np.zeros(N + 1)
            expected[m] = 1.0 / gamma_ratio(m + s + 1.0, m + 1.0)
            for side in Side:
                e = solve_fivp(FivpProblem(rhs, s, side), N)
                coefficient_gap = max(coefficient_gap, float(np.max(np.abs(e.coeffs - expected))))
                reproduced = np.atleast_1d(eval_frac_deriv_solution(e, grid))
                reproduce_gap = max(reproduce_gap, float(np.max(np.abs(reproduced - rhs(grid)))))
    passed = coefficient_gap <= limit and reproduce_gap <= reproduce_limit
    return SuiteResult('pg-exactness', passed, coefficient_gap, limit, {'reproduce_gap': reproduce_gap})


def check_galerkin(settings) -> SuiteResult:
    """Galerkin residuals vanish for every benchmark, both anchors."""
    limit = float(settings['galerkin_tol'])
    s = float(settings['decay_order'])
    N = int(get_pg_settings()['value_n'])
    worst = 0.0
    residuals = {}
    for name, rhs in RHS_REGISTRY.items():
        sides = [Side.RIGHT] if rhs.reaction else list(Side)
        for side in sides:
            problem = problem_for(rhs, s, side)
            e = solve_fivp(problem, N)
            r = galerkin_residual(e, problem.rhs)
            size = max(1.0, float(np.max(np.abs(e.coeffs))))
            residuals[f"{name}/{side.value}"] = float(np.max(np.abs(r))) / size
            worst = max(worst, residuals[f"{name}/{side.value}"])
    defect = collocation_defect(solve_fivp(problem_for(RHS_REGISTRY['ex41'], s, Side.RIGHT), N),
                                RHS_REGISTRY['ex41'].rhs(s))
    return SuiteResult('galerkin', worst <= limit, worst, limit,
                       {'residuals': residuals, 'collocation_defect': defect})


def check_pg_decay(settings) -> SuiteResult:
    """Value errors fall by the decay factor per step of N until the noise floor."""
    limit = float(settings['decay_factor'])
    floor = float(settings['decay_floor'])
    pg = get_pg_settings()
    problem = problem_for(RHS_REGISTRY['ex41'], float(settings['decay_order']), Side.RIGHT)
    table = convergence_table(problem, [int(n) for n in settings['decay_n']], int(pg['ref_n']),
                              int(pg['grid_size']))
    errors = table['value_error'].tolist()
    worst = 0.0
    for previous, current in zip(errors, errors[1:]):
        if previous <= floor:
            break
        worst = max(worst, current / previous)
    return SuiteResult('pg-decay', worst <= limit, worst, limit,
                       {'N': table['N'].tolist(), 'value_error': errors})


def check_pg_superconvergence(settings) -> SuiteResult:
    """Max error at the PG superpoints is at most a fixed fraction of the global max."""
    pg = get_pg_settings()
    limit = float(pg['max_superpoint_ratio'])
    floor = float(settings['decay_floor'])
    worst = 0.0
    ratios = {}
    for name in ('ex41', 'ex42', 'ex43'):
        rhs = RHS_REGISTRY[name]
        deriv_n = get_deriv_n(name, rhs.default_deriv_n)
        for s in pg['orders']:
            s = float(s)
            curves = pg_error_curves(problem_for(rhs, s, Side.RIGHT), int(pg['value_n']), deriv_n,
                                     int(pg['ref_n']), int(pg['grid_size']))
            for label, curve in (('value', curves.value), ('deriv', curves.deriv)):
                # below the noise floor the ratio carries no information
                if curve.global_max <= floor:
                    continue
                ratio = curve.max_at_superpoints / curve.global_max
                ratios[f"{name}/{label}/{s:g}"] = ratio
                worst = max(worst, ratio)
    return SuiteResult('pg-superconvergence', worst <= limit, worst, limit, {'ratios': ratios})


def check_reaction(settings) -> SuiteResult:
    """
    The reaction problem is solved exactly once its solution lies in the trial
    space, and at the default value N its error at the value superpoints stays
    below the superpoint ratio limit.
    """
    limit = float(settings['reaction_tol'])
    pg = get_pg_settings()
    rhs = RHS_REGISTRY['remark45']
    N = int(settings['reaction_n'])
    grid = np.linspace(-1.0, 1.0, int(pg['grid_size']))
    worst = 0.0
    ratios = {}
    for s in pg['orders']:
        s = float(s)
        problem = problem_for(rhs, s, Side.RIGHT)
        exact = rhs.exact_solution(s)
        e = solve_fivp(problem, N)
        u = np.asarray(exact(grid), dtype=float)
        gap = float(np.max(np.abs(u - np.atleast_1d(eval_solution(e, grid))))) / float(np.max(np.abs(u)))
        worst = max(worst, gap)
        curves = pg_error_curves(problem, int(pg['value_n']), None, grid_size=int(pg['grid_size']),
                                 exact_solution=exact)
        ratios[f"{s:g}"] = curves.value.max_at_superpoints / curves.value.global_max
    ratio_limit = float(pg['max_superpoint_ratio'])
    worst_ratio = max(ratios.values())
    passed = worst <= limit and worst_ratio <= ratio_limit
    return SuiteResult('reaction', passed, worst, limit,
                       {'value_ratios': ratios, 'worst_ratio': worst_ratio, 'ratio_limit': ratio_limit, 'N': N})


VALIDATION_SUITES: Dict[str, Callable[[Dict[str, Any]], SuiteResult]] = {
    'quadrature': check_quadrature,
    'oracle': check_oracle,
    'classical-limit': check_classical_limit,
    'superpoints': check_superpoints,
    'mirror': check_mirror,
    'interp-gain': check_interp_gain,
    'pg-exactness': check_pg_exactness,
    'galerkin': check_galerkin,
    'pg-decay': check_pg_decay,
    'pg-superconvergence': check_pg_superconvergence,
    'reaction': check_reaction,
}


def run_suite(name: str, settings: Optional[Dict[str, Any]] = None) -> SuiteResult:
    settings = settings or get_validate_settings()
    start = time.monotonic()
    try:
        result = VALIDATION_SUITES[name](settings)
    except SuperfracError as e:
        logger.error("Suite '%s' raised: %s", name, e)
        result = SuiteResult(name, False, float('nan'), float('nan'), {'error': str(e)})
    duration = round(time.monotonic() - start, 2)
    logger.info("Suite '%s' %s (worst=%.3e, limit=%.1e, %.2fs)",
                name, 'passed' if result.passed else 'FAILED', result.worst, result.limit, duration,
                extra={'suite': name, 'duration_s': duration})
    return result


def run_validation(names: Optional[List[str]] = None) -> List[SuiteResult]:
    settings = get_validate_settings()
    return [run_suite(name, settings) for name in (names or list(VALIDATION_SUITES))]


# ── Command adapter ──────────────────────────────────────────────────────────

class ValidateExperiment(ExperimentAdapter):
    command = 'validate'
    description = 'Run the numerical self-checks; exit code 3 if any suite fails'
    defaults = {'suites': list(VALIDATION_SUITES)}

    def run(self, config: ExperimentConfig) -> ExperimentResult:
        results = run_validation()
        table = pd.DataFrame(
            [{'suite': r.name, 'passed': r.passed, 'worst': r.worst, 'limit': r.limit} for r in results],
            columns=['suite', 'passed', 'worst', 'limit'],
        )
        failed = [r.name for r in results if not r.passed]
        summary = {
            'passed': not failed,
            'failed': failed,
            'suites': {r.name: {'passed': r.passed, 'worst': r.worst, 'limit': r.limit, **r.detail}
                       for r in results},
        }
        meta = {'command': self.command, 'suites': len(results), 'failed': len(failed)}
        return ExperimentResult(table=table, summary=summary, meta=meta, failed=failed)
