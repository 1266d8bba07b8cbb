"""
GJF Petrov-Galerkin solver for fractional initial/terminal value problems.

    D^s u = f on (-1, 1), u(1) = 0        (right RL derivative)
    D^s u + u = f                         (reaction variant)

Trial space: (1-x)^s P_n^{(s,-s)}, n = 0..N. Test space: Legendre L_k.
The right derivative maps each trial function to Γ(n+s+1)/n! L_n, so the
pure-derivative system is diagonal: ũ_n = n!/Γ(n+s+1) f̃_n. The reaction
term adds a dense mass block integrated exactly by Gauss-Jacobi.

The left-anchored problem (u(-1) = 0, left derivative) uses
(1+x)^s P_n^{(-s,s)} with the same coefficients.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.linalg import lu_factor, lu_solve

from superfrac.exceptions import DomainError, IllConditionedSystemError
from superfrac.pipeline.base import ExperimentAdapter, ExperimentConfig, ExperimentResult
from superfrac.pipeline.experiment_config import get_deriv_n, get_pg_settings, pg_quad_points
from superfrac.pipeline.interp import ErrorCurve, gain_ratio
from superfrac.pipeline.superpoints import SuperPointSet, pg_fracderiv_superpoints, pg_value_superpoints
from superfrac.services.fracderiv import FracSpec, GjfBasisId, GjfVariant, SingularPoly, gjf_frac_deriv
from superfrac.services.functions import RhsSpec, resolve_rhs
from superfrac.services.orthopoly import (
    JacobiParam,
    JacobiSeries,
    Side,
    gauss_jacobi_rule,
    jacobi_vandermonde,
    legendre_expand,
)
from superfrac.services.specialfn import gamma_ratio

logger = logging.getLogger('pipeline.pgsolver')

LEGENDRE = JacobiParam(0.0, 0.0)


@dataclass(frozen=True)
class FivpProblem:
    rhs: Callable
    s: float
    side: Side = Side.RIGHT
    reaction: bool = False

    def __post_init__(self):
        if not 0.0 < self.s < 1.0:
            raise DomainError(f"Order s must lie in (0, 1), got {self.s}")


@dataclass(frozen=True)
class GjfExpansion:
    """u_N = Σ ũ_n (1∓x)^s P_n^{(±s,∓s)}."""
    s: float
    side: Side
    coeffs: np.ndarray
    reaction: bool = False

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    @property
    def trial_params(self) -> JacobiParam:
        return JacobiParam(self.s, -self.s) if self.side is Side.RIGHT else JacobiParam(-self.s, self.s)

    def as_singular(self) -> SingularPoly:
        return SingularPoly(self.side, self.s, JacobiSeries(self.trial_params, tuple(self.coeffs)))

    def basis_id(self, n: int) -> GjfBasisId:
        if self.side is Side.RIGHT:
            return GjfBasisId(GjfVariant.PLUS, self.s, -self.s, n)
        return GjfBasisId(GjfVariant.MINUS, -self.s, self.s, n)

    def frac_deriv_legendre(self) -> np.ndarray:
        """Legendre coefficients of D^s u_N, from the GJF derivative identity."""
        return np.array([gjf_frac_deriv(self.basis_id(n)).coefficient * c for n, c in enumerate(self.coeffs)])


def _gjf_scaling(n: int, s: float) -> float:
    """n!/Γ(n+s+1): inverse of the GJF derivative eigenvalue."""
    return 1.0 / gamma_ratio(n + s + 1.0, n + 1.0)


def _projection(problem: FivpProblem, N: int, quad_points: Optional[int]) -> np.ndarray:
    return legendre_expand(problem.rhs, N, quad_points or pg_quad_points(N))


def solve_fivp(problem: FivpProblem, N: int, quad_points: Optional[int] = None) -> GjfExpansion:
    """Diagonal solve ũ_n = n!/Γ(n+s+1) f̃_n on the right-anchored basis."""
    if problem.reaction:
        return solve_reaction_fivp(problem, N, quad_points)
    if N < 0:
        raise DomainError(f"N must be >= 0, got {N}")
    f_tilde = _projection(problem, N, quad_points)
    coeffs = np.array([_gjf_scaling(n, problem.s) * f_tilde[n] for n in range(N + 1)])
    return GjfExpansion(problem.s, problem.side, coeffs)


def solve_fivp_left(problem: FivpProblem, N: int, quad_points: Optional[int] = None) -> GjfExpansion:
    """Left-anchored problem, u(-1) = 0, on (1+x)^s P_n^{(-s,s)}."""
    left = FivpProblem(problem.rhs, problem.s, Side.LEFT, problem.reaction)
    return solve_fivp(left, N, quad_points)


def reaction_matrix(s: float, N: int, side: Side = Side.RIGHT) -> np.ndarray:
    """A_kn = (D^s φ_n, L_k) + (φ_n, L_k) with φ_n the trial GJFs."""
    n = np.arange(N + 1)
    norms = 2.0 / (2.0 * n + 1.0)
    eigen = np.array([gamma_ratio(k + s + 1.0, k + 1.0) for k in n])
    weight = JacobiParam(s, 0.0) if side is Side.RIGHT else JacobiParam(0.0, s)
    trial = JacobiParam(s, -s) if side is Side.RIGHT else JacobiParam(-s, s)
    rule = gauss_jacobi_rule(weight, N + 8)
    P = jacobi_vandermonde(trial, N, rule.nodes)
    L = jacobi_vandermonde(LEGENDRE, N, rule.nodes)
    mass = L.T @ (rule.weights[:, None] * P)
    return np.diag(eigen * norms) + mass


def solve_reaction_fivp(problem: FivpProblem, N: int, quad_points: Optional[int] = None) -> GjfExpansion:
    """Dense LU solve of the reaction system A ũ = F with F_k = (f, L_k)."""
    if N < 0:
        raise DomainError(f"N must be >= 0, got {N}")
    limit = float(get_pg_settings()['reaction_condition_limit'])
    A = reaction_matrix(problem.s, N, problem.side)
    condition = float(np.linalg.cond(A))
    if not np.isfinite(condition) or condition > limit:
        raise IllConditionedSystemError(condition, limit)
    f_tilde = _projection(problem, N, quad_points)
    F = f_tilde * 2.0 / (2.0 * np.arange(N + 1) + 1.0)
    coeffs = lu_solve(lu_factor(A), F)
    logger.debug("Reaction solve s=%s N=%s cond=%.3e", problem.s, N, condition)
    return GjfExpansion(problem.s, problem.side, coeffs, reaction=True)


def eval_solution(e: GjfExpansion, x):
    return e.as_singular().evaluate(x)


def eval_frac_deriv_solution(e: GjfExpansion, x):
    """D^s u_N = Σ Γ(n+s+1)/n! ũ_n L_n."""
    return JacobiSeries(LEGENDRE, tuple(e.frac_deriv_legendre())).evaluate(x)


# ── Diagnostics ──────────────────────────────────────────────────────────────

def galerkin_residual(e: GjfExpansion, rhs: Callable, quad_points: Optional[int] = None) -> np.ndarray:
    """
    r_k = (D^s u_N + [reaction] u_N - f, L_k), k = 0..N.

    The derivative term is polynomial (Gauss-Legendre, 2N+16 points); the
    reaction term is integrated against (1∓x)^s by Gauss-Jacobi.
    """
    N = e.N
    points = 2 * N + 16
    legendre_rule = gauss_jacobi_rule(LEGENDRE, points)
    L = jacobi_vandermonde(LEGENDRE, N, legendre_rule.nodes)
    derivative = np.atleast_1d(eval_frac_deriv_solution(e, legendre_rule.nodes))
    residual = L.T @ (legendre_rule.weights * derivative)

    if e.reaction:
        weight = JacobiParam(e.s, 0.0) if e.side is Side.RIGHT else JacobiParam(0.0, e.s)
        rule = gauss_jacobi_rule(weight, points)
        series = JacobiSeries(e.trial_params, tuple(e.coeffs)).evaluate(rule.nodes)
        residual += jacobi_vandermonde(LEGENDRE, N, rule.nodes).T @ (rule.weights * series)

    f_tilde = legendre_expand(rhs, N, quad_points or pg_quad_points(N))
    residual -= f_tilde * 2.0 / (2.0 * np.arange(N + 1) + 1.0)
    return residual


def collocation_defect(e: GjfExpansion, rhs: Callable, grid_size: int = 2001) -> Dict[str, float]:
    """
    Pointwise residual D^s u_N (+ u_N) - f at the Gauss points of L_{N+1}
    against its max over a dense grid. Galerkin and Gauss collocation nearly
    coincide, so the Gauss-point defect is small.
    """
    def defect(x):
        value = np.atleast_1d(eval_frac_deriv_solution(e, x)) - np.asarray(rhs(x), dtype=float)
        if e.reaction:
            value = value + np.atleast_1d(eval_solution(e, x))
        return value

    gauss = pg_fracderiv_superpoints(e.N).points
    at_gauss = float(np.max(np.abs(defect(gauss))))
    dense = float(np.max(np.abs(defect(np.linspace(-1.0, 1.0, grid_size)))))
    return {'at_gauss': at_gauss, 'global': dense, 'ratio': at_gauss / dense if dense > 0 else 0.0}


def reference_expansion(problem: FivpProblem, ref_n: int) -> GjfExpansion:
    """High-order solution used as the exact one when no closed form is known."""
    return solve_fivp(problem, ref_n)


@dataclass
class PgErrorCurves:
    value: Optional[ErrorCurve] = None
    deriv: Optional[ErrorCurve] = None
    meta: Dict[str, float] = field(default_factory=dict)


def _curve(grid, errors, sps: SuperPointSet, at_points, spec, floor) -> ErrorCurve:
    max_at = float(np.max(np.abs(at_points))) if at_points.size else 0.0
    global_max = max(float(np.max(np.abs(errors))), max_at)
    return ErrorCurve(grid, errors, sps, at_points, global_max, gain_ratio(global_max, max_at, floor), spec)


def pg_error_curves(problem: FivpProblem, value_n: Optional[int], deriv_n: Optional[int],
                    ref_n: int = 41, grid_size: int = 2001,
                    exact_solution: Optional[Callable] = None,
                    floor: float = 1e-14) -> PgErrorCurves:
    """
    Value and fractional-derivative error curves against the exact solution
    (when given) or the N = ref_n reference expansion.
    """
    grid = np.linspace(-1.0, 1.0, grid_size)
    spec = FracSpec(problem.s, problem.side)
    curves = PgErrorCurves()
    reference = None if exact_solution is not None else reference_expansion(problem, ref_n)

    def exact_value(x):
        return np.asarray(exact_solution(x), dtype=float) if exact_solution else \
            np.atleast_1d(eval_solution(reference, x))

    def exact_deriv(x):
        if exact_solution is None:
            return np.atleast_1d(eval_frac_deriv_solution(reference, x))
        value = np.asarray(problem.rhs(x), dtype=float)
        return value - np.asarray(exact_solution(x), dtype=float) if problem.reaction else value

    if value_n is not None:
        e = solve_fivp(problem, value_n)
        sps = pg_value_superpoints(problem.s, value_n, problem.side)
        errors = exact_value(grid) - np.atleast_1d(eval_solution(e, grid))
        at_points = exact_value(sps.points) - np.atleast_1d(eval_solution(e, sps.points))
        curves.value = _curve(grid, errors, sps, at_points, spec, floor)

    if deriv_n is not None:
        e = solve_fivp(problem, deriv_n)
        sps = pg_fracderiv_superpoints(deriv_n)
        errors = exact_deriv(grid) - np.atleast_1d(eval_frac_deriv_solution(e, grid))
        at_points = exact_deriv(sps.points) - np.atleast_1d(eval_frac_deriv_solution(e, sps.points))
        curves.deriv = _curve(grid, errors, sps, at_points, spec, floor)

    return curves


def convergence_table(problem: FivpProblem, Ns: Sequence[int], ref_n: int = 41, grid_size: int = 2001,
                      exact_solution: Optional[Callable] = None) -> pd.DataFrame:
    """Max-norm value and derivative errors per N."""
    rows = []
    for N in Ns:
        curves = pg_error_curves(problem, N, N, ref_n, grid_size, exact_solution)
        rows.append({'N': N, 'value_error': curves.value.global_max, 'deriv_error': curves.deriv.global_max})
    return pd.DataFrame(rows, columns=['N', 'value_error', 'deriv_error'])


def problem_for(rhs: RhsSpec, s: float, side: Side) -> FivpProblem:
    return FivpProblem(rhs.rhs(s), s, side, rhs.reaction)


# ── Command adapter ──────────────────────────────────────────────────────────

class PgSolveExperiment(ExperimentAdapter):
    command = 'pg-solve'
    description = 'GJF Petrov-Galerkin solutions: value and fractional-derivative error curves'
    defaults = {'rhs': 'builtin:ex41', 'n': 9, 'ref_n': 41, 'grid': 2001, 'side': 'right'}

    def run(self, config: ExperimentConfig) -> ExperimentResult:
        settings = get_pg_settings()
        rhs = resolve_rhs(config.function_id or self.defaults['rhs'])
        orders = config.orders or [float(o) for o in settings['orders']]
        side = Side(config.side or 'right')
        grid_size = config.grid_size or int(settings['grid_size'])
        value_n = config.n if config.n is not None else int(settings['value_n'])
        deriv_n = config.n if config.n is not None else get_deriv_n(rhs.name, rhs.default_deriv_n)
        if config.scheme == 'pg-value':
            deriv_n = None
        elif config.scheme == 'pg-frac':
            value_n = None

        columns: Dict[str, np.ndarray] = {}
        per_order: List[dict] = []
        for s in orders:
            problem = problem_for(rhs, s, side)
            # closed-form solutions are stated for the right-anchored problem
            exact = rhs.exact_solution(s) if rhs.exact_solution and side is Side.RIGHT else None
            curves = pg_error_curves(problem, value_n, deriv_n, config.ref_n, grid_size, exact)
            entry = {'s': s}
            for name, curve in (('value', curves.value), ('deriv', curves.deriv)):
                if curve is None:
                    continue
                columns.setdefault('x', curve.grid)
                columns[f"{name}_err_s{s:g}"] = curve.errors
                entry[name] = {
                    'global_max': curve.global_max,
                    'max_at_superpoints': curve.max_at_superpoints,
                    'gain_ratio': curve.gain_ratio,
                    'superpoints': curve.superpoints.points,
                    'includes_anchor': curve.superpoints.includes_anchor,
                }
            per_order.append(entry)

        table = pd.DataFrame(columns)
        summary = {
            'rhs': rhs.name,
            'side': side.value,
            'value_n': value_n,
            'deriv_n': deriv_n,
            'ref_n': config.ref_n,
            'reference': 'exact' if rhs.exact_solution and side is Side.RIGHT else f"N={config.ref_n}",
            'orders': per_order,
        }
        meta = {'command': self.command, 'rhs': rhs.name, 'side': side.value,
                'value_n': value_n, 'deriv_n': deriv_n, 'orders': orders}
        return ExperimentResult(table=table, summary=summary, meta=meta)