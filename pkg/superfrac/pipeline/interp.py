"""
Collocation interpolation at node families and fractional-derivative error curves.

u_N is held three ways: barycentric (evaluation), Legendre coefficients
(stable fractional derivative, mode by mode through
D^μ L_n = n!/Γ(n+1-μ) (1+x)^{-μ} P_n^{(μ,-μ)}), and shifted powers on demand.
"""
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd
from scipy.interpolate import BarycentricInterpolator

from superfrac.exceptions import DomainError
from superfrac.pipeline.base import ExperimentAdapter, ExperimentConfig, ExperimentResult
from superfrac.pipeline.experiment_config import get_interp_settings
from superfrac.pipeline.superpoints import SuperPointSet, interp_superpoints
from superfrac.services.fracderiv import FracSpec, Kind, SingularPoly, frac_deriv_power
from superfrac.services.functions import resolve_interp_function
from superfrac.services.orthopoly import (
    JacobiParam,
    JacobiSeries,
    NodeFamily,
    PowerBasisPoly,
    Side,
    jacobi_power_coeffs,
    jacobi_vandermonde,
    node_family_points,
)
from superfrac.services.specialfn import gamma_ratio, rgamma

logger = logging.getLogger('pipeline.interp')

LEGENDRE = JacobiParam(0.0, 0.0)


def _mode_factor(n: int, mu: float) -> float:
    """n!/Γ(n+1-μ), zero at the pole n+1-μ = 0."""
    if n + 1 - mu == 0:
        return 0.0
    return gamma_ratio(n + 1.0, n + 1.0 - mu)


@dataclass
class Interpolant:
    """The degree-N polynomial through f at the family's N+1 nodes."""
    family: NodeFamily
    N: int
    nodes: np.ndarray
    values: np.ndarray

    @cached_property
    def legendre_coeffs(self) -> np.ndarray:
        V = jacobi_vandermonde(LEGENDRE, self.N, self.nodes)
        return np.linalg.solve(V, self.values)

    @cached_property
    def _barycentric(self) -> BarycentricInterpolator:
        return BarycentricInterpolator(self.nodes, self.values)

    def evaluate(self, x):
        out = self._barycentric(np.atleast_1d(np.asarray(x, dtype=float)))
        return float(out[0]) if np.ndim(x) == 0 else np.asarray(out, dtype=float)

    def power_form_on(self, side: Side) -> PowerBasisPoly:
        poly = None
        for n, a in enumerate(self.legendre_coeffs):
            term = jacobi_power_coeffs(LEGENDRE, n, side).scaled(float(a))
            poly = term if poly is None else poly + term
        return poly

    @cached_property
    def power_form(self) -> PowerBasisPoly:
        """u_N in powers of (1+x)."""
        return self.power_form_on(Side.LEFT)

    def frac_deriv(self, spec: FracSpec) -> SingularPoly:
        """D^μ u_N from the Legendre coefficients."""
        if spec.is_classical:
            return frac_deriv_power(self.power_form_on(spec.side), spec)
        mu = spec.order
        coeffs = [a * _mode_factor(n, mu) for n, a in enumerate(self.legendre_coeffs)]
        params = JacobiParam(mu, -mu) if spec.side is Side.LEFT else JacobiParam(-mu, mu)
        series = JacobiSeries(params, tuple(coeffs))
        if spec.kind is Kind.CAPUTO:
            start = self.evaluate(spec.side.anchor_point)
            series = series.with_constant_shift(-start * rgamma(1.0 - mu))
        return SingularPoly(spec.side, -mu, series)

    def frac_deriv_power_route(self, spec: FracSpec) -> SingularPoly:
        """D^μ u_N through the shifted-power rule."""
        return frac_deriv_power(self.power_form_on(spec.side), spec)


def interpolate(f: Callable, family: NodeFamily, N: int) -> Interpolant:
    if N < 1:
        raise DomainError(f"Interpolation needs N >= 1, got {N}")
    nodes = node_family_points(family, N)
    values = np.asarray(f(nodes), dtype=float) * np.ones_like(nodes)
    return Interpolant(family, N, nodes, values)


# ── Error curves ─────────────────────────────────────────────────────────────

@dataclass
class ErrorCurve:
    grid: np.ndarray
    errors: np.ndarray
    superpoints: SuperPointSet
    errors_at_superpoints: np.ndarray
    global_max: float
    gain_ratio: float
    spec: Optional[FracSpec] = None

    @property
    def max_at_superpoints(self) -> float:
        return float(np.max(np.abs(self.errors_at_superpoints))) if self.errors_at_superpoints.size else 0.0


def error_grid(side: Side, grid_size: int, guard: float) -> np.ndarray:
    """Uniform grid on [-1+guard, 1] (left anchor) or [-1, 1-guard] (right)."""
    if side is Side.LEFT:
        return np.linspace(-1.0 + guard, 1.0, grid_size)
    return np.linspace(-1.0, 1.0 - guard, grid_size)


def gain_ratio(global_max: float, max_at_superpoints: float, floor: float, interior: bool = True) -> float:
    """
    global_max / max_at_superpoints. 1 once the global error is below the floor;
    NaN when the point set has no interior point to compare against.
    """
    if not interior:
        return math.nan
    if global_max <= floor:
        return 1.0
    if max_at_superpoints == 0:
        return math.inf
    return global_max / max_at_superpoints


def frac_error_curve(f, exact_frac_deriv: Optional[Callable], family: NodeFamily, N: int,
                     spec: FracSpec, grid_size: Optional[int] = None,
                     interpolant: Optional[Interpolant] = None) -> ErrorCurve:
    """
    errors(x) = D^μ u(x) - D^μ u_N(x) on the guarded grid, plus the errors at
    the superpoints. At an anchor superpoint both derivatives vanish in the
    limit, so its error is recorded as 0.
    """
    settings = get_interp_settings()
    grid_size = grid_size or int(settings['grid_size'])
    exact = exact_frac_deriv or (lambda x: f.frac_deriv(spec, x))
    u_N = interpolant or interpolate(f, family, N)
    approx = u_N.frac_deriv(spec)

    grid = error_grid(spec.side, grid_size, float(settings['singular_guard']))
    errors = np.asarray(exact(grid), dtype=float) - np.atleast_1d(approx.evaluate(grid))

    superpoints = interp_superpoints(family, N, spec)
    interior = superpoints.points[superpoints.points != spec.side.anchor_point]
    at_points = np.zeros(superpoints.points.size)
    if interior.size:
        interior_errors = np.asarray(exact(interior), dtype=float) - np.atleast_1d(approx.evaluate(interior))
        at_points[superpoints.points != spec.side.anchor_point] = interior_errors

    max_at = float(np.max(np.abs(at_points))) if at_points.size else 0.0
    global_max = max(float(np.max(np.abs(errors))), max_at)
    ratio = gain_ratio(global_max, max_at, float(settings['zero_floor']), interior=bool(interior.size))
    logger.debug("%s N=%s mu=%s: global_max=%.3e at_super=%.3e gain=%.2f",
                 family.value, N, spec.order, global_max, max_at, ratio)
    return ErrorCurve(grid, errors, superpoints, at_points, global_max, ratio, spec)


def _order_column(prefix: str, order: float) -> str:
    return f"{prefix}{order:g}"


# ── Command adapter ──────────────────────────────────────────────────────────

class InterpErrorExperiment(ExperimentAdapter):
    command = 'interp-error'
    description = 'Fractional-derivative interpolation error curves with superpoint gain ratios'
    defaults = {'family': 'legendre-gauss', 'n': 12, 'rhs': 'builtin:ex31', 'grid': 2001, 'kind': 'rl'}

    def run(self, config: ExperimentConfig) -> ExperimentResult:
        settings = get_interp_settings()
        family = NodeFamily(config.family or self.defaults['family'])
        n = config.n if config.n is not None else int(settings['n'])
        orders = config.orders or [float(o) for o in settings['orders']]
        function_id = config.function_id or f"builtin:{settings['function']}"
        grid_size = config.grid_size or int(settings['grid_size'])
        side = Side(config.side or 'left')
        kind = Kind(config.kind)

        f = resolve_interp_function(function_id)
        u_N = interpolate(f, family, n)
        columns: Dict[str, np.ndarray] = {}
        per_order: List[dict] = []
        for order in orders:
            spec = FracSpec(order, side, kind)
            curve = frac_error_curve(f, None, family, n, spec, grid_size, interpolant=u_N)
            columns.setdefault('x', curve.grid)
            columns[_order_column('err_mu', order)] = curve.errors
            per_order.append({
                'order': order,
                'global_max': curve.global_max,
                'max_at_superpoints': curve.max_at_superpoints,
                'gain_ratio': curve.gain_ratio,
                'superpoints': curve.superpoints.points,
            })

        table = pd.DataFrame(columns)
        summary = {
            'family': family.value,
            'N': n,
            'kind': kind.value,
            'side': side.value,
            'function': function_id,
            'grid_size': grid_size,
            'orders': per_order,
        }
        meta = {'command': self.command, 'family': family.value, 'N': n,
                'kind': kind.value, 'function': function_id, 'orders': orders}
        return ExperimentResult(table=table, summary=summary, meta=meta)
