"""
Superconvergence point sets.

Interpolation: zeros of D^μ w_{N+1}. Legendre families on their own side use
Jacobi roots of the closed-form factor (plus the anchor when the factor
carries a positive power of the distance); everything else is a sign scan of
the polynomial factor q of the SingularPoly followed by brentq.

Petrov-Galerkin: value points are the zeros of P_{N+1}^{(s,-s)}; fractional
derivative points are the Gauss points, whatever s is.
"""
import logging
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
import pandas as pd
from scipy.optimize import brentq

from superfrac.exceptions import DomainError
from superfrac.pipeline.base import ExperimentAdapter, ExperimentConfig, ExperimentResult
from superfrac.pipeline.experiment_config import get_interp_settings, get_pg_settings, get_superpoint_settings
from superfrac.services.fracderiv import (
    FracSpec,
    Kind,
    SingularPoly,
    closed_form_available,
    frac_deriv_node_poly,
    frac_deriv_node_poly_power,
)
from superfrac.services.orthopoly import JacobiParam, NodeFamily, PowerBasisPoly, Side, jacobi_roots

logger = logging.getLogger('pipeline.superpoints')


@dataclass(frozen=True)
class SuperPointSet:
    """Ordered superconvergence abscissae and where they came from."""
    label: str
    order: Optional[float]
    kind: Kind
    points: np.ndarray
    includes_anchor: bool
    side: Side = Side.LEFT
    N: int = 0

    def __len__(self):
        return len(self.points)

    def mirrored(self) -> 'SuperPointSet':
        return SuperPointSet(self.label, self.order, self.kind, -self.points[::-1].copy(),
                             self.includes_anchor, self.side.mirror, self.N)


# ── Root scan ────────────────────────────────────────────────────────────────

def _factor_at_distance(sp: SingularPoly, t: np.ndarray) -> np.ndarray:
    """q evaluated at anchor distance t, in extended precision for power factors."""
    if isinstance(sp.poly, PowerBasisPoly):
        return np.array([float(sp.poly.evaluate_at_distance(float(ti))) for ti in t])
    x = sp.anchor.anchor_point + (t if sp.anchor is Side.LEFT else -t)
    return np.atleast_1d(sp.poly.evaluate(x))


def _scan_grid(settings) -> np.ndarray:
    panels = int(settings['scan_panels'])
    # cosine-clustered in x, expressed as distance from the anchor
    clustered = 1.0 - np.cos(np.pi * np.arange(panels + 1) / panels)
    near = np.geomspace(float(settings['near_anchor_min']), float(settings['near_anchor_max']),
                        int(settings['near_anchor_samples']))
    t = np.unique(np.concatenate((clustered, near)))
    return t[t > 0]


def _distance_to_x(anchor: Side, t):
    return anchor.anchor_point + t if anchor is Side.LEFT else anchor.anchor_point - t


def scan_roots(sp: SingularPoly, settings=None) -> np.ndarray:
    """
    Zeros of the SingularPoly in [-1, 1], ascending.

    The polynomial factor is sampled on a clustered grid in the anchor
    distance t, sign changes are refined with brentq, and the anchor is added
    when the singular factor vanishes there.
    """
    settings = settings or get_superpoint_settings()
    tol = float(settings['root_tol'])
    t = _scan_grid(settings)
    q = _factor_at_distance(sp, t)

    roots = list(t[q == 0.0])
    for i in range(len(t) - 1):
        if q[i] * q[i + 1] < 0:
            f = lambda ti: float(_factor_at_distance(sp, np.array([ti]))[0])
            roots.append(brentq(f, t[i], t[i + 1], xtol=tol))

    x = np.sort(_distance_to_x(sp.anchor, np.array(roots, dtype=float)))
    if sp.vanishes_at_anchor() and sp.singular_exponent > 0:
        x = np.sort(np.append(x, sp.anchor.anchor_point))
    if x.size > 1:
        keep = np.concatenate(([True], np.diff(x) > tol * 10))
        x = x[keep]
    return x


def factor_residuals(sp: SingularPoly, points: np.ndarray, settings=None) -> np.ndarray:
    """|q(p)| / max|q| for each point; anchor points where the function vanishes count as 0."""
    settings = settings or get_superpoint_settings()
    scale = np.max(np.abs(_factor_at_distance(sp, _scan_grid(settings))))
    if scale == 0:
        return np.zeros(len(points))
    t = sp.anchor.distance(np.asarray(points, dtype=float))
    residuals = np.abs(_factor_at_distance(sp, np.maximum(t, 0.0))) / scale
    if sp.singular_exponent > 0:
        residuals[t == 0] = 0.0
    return residuals


# ── Interpolation superpoints ────────────────────────────────────────────────

def generating_function(family: NodeFamily, N: int, spec: FracSpec) -> SingularPoly:
    """The SingularPoly D^μ w_{N+1} whose zeros are the superpoints."""
    if closed_form_available(family, spec.side) and not (family.kind == 'gauss' and spec.kind is Kind.CAPUTO):
        return frac_deriv_node_poly(family, N, spec)
    # Caputo-Gauss: q vanishes at the anchor, the power route factors it out exactly
    return frac_deriv_node_poly_power(family, N, spec)


def _left_closed_points(family: NodeFamily, N: int, mu: float) -> Optional[np.ndarray]:
    kind = family.kind
    if kind == 'gauss':
        return jacobi_roots(JacobiParam(mu, -mu), N + 1)
    if kind == 'lobatto':
        return np.concatenate(([-1.0], jacobi_roots(JacobiParam(mu - 1.0, 1.0 - mu), N)))
    if kind == 'radau-left':
        return np.concatenate(([-1.0], jacobi_roots(JacobiParam(mu, 1.0 - mu), N)))
    return None


def interp_superpoints(family: NodeFamily, N: int, spec: FracSpec) -> SuperPointSet:
    """Zeros of D^μ w_{N+1}: superconvergence points of the fractional derivative of u_N."""
    if N < 2:
        raise DomainError(f"Superpoints need N >= 2, got {N}")
    if spec.is_classical:
        raise DomainError("Superpoints need a fractional order in (0, 1)")
    if spec.side is Side.RIGHT:
        return replace(interp_superpoints(family.mirror, N, spec.mirrored()).mirrored(), label=family.value)

    points = None
    if family.is_legendre and closed_form_available(family, Side.LEFT):
        if spec.kind is Kind.RL or family.kind != 'gauss':
            points = _left_closed_points(family, N, spec.order)
    if points is None:
        logger.debug("No closed-form roots for %s (%s); scanning", family.value, spec.kind.value)
        points = scan_roots(generating_function(family, N, spec))

    includes_anchor = bool(points.size and points[0] == -1.0)
    if family.is_legendre and points.size != N + 1:
        logger.warning("%s N=%s mu=%s: found %s superpoints, expected %s",
                       family.value, N, spec.order, points.size, N + 1)
    return SuperPointSet(family.value, spec.order, spec.kind, points, includes_anchor, Side.LEFT, N)


# ── Petrov-Galerkin superpoints ──────────────────────────────────────────────

def pg_value_superpoints(s: float, N: int, side: Side = Side.RIGHT) -> SuperPointSet:
    """
    Zeros of P_{N+1}^{(s,-s)} (right-anchored problem). The anchor x = 1,
    where every GJF vanishes, is flagged rather than listed.
    """
    if not 0.0 < s < 1.0:
        raise DomainError(f"Order s must lie in (0, 1), got {s}")
    if N < 0:
        raise DomainError(f"N must be >= 0, got {N}")
    points = jacobi_roots(JacobiParam(s, -s), N + 1)
    sps = SuperPointSet('pg-value', s, Kind.RL, points, True, Side.RIGHT, N)
    return sps if side is Side.RIGHT else sps.mirrored()


def pg_fracderiv_superpoints(N: int) -> SuperPointSet:
    """Gauss points: zeros of L_{N+1}, the same for every s."""
    if N < 0:
        raise DomainError(f"N must be >= 0, got {N}")
    points = jacobi_roots(JacobiParam(0.0, 0.0), N + 1)
    return SuperPointSet('pg-frac', None, Kind.RL, points, False, Side.RIGHT, N)


# ── Command adapter ──────────────────────────────────────────────────────────

def _point_rows(sps: SuperPointSet, order):
    return [{'order': order, 'index': i, 'x': float(x)} for i, x in enumerate(sps.points)]


class PointsExperiment(ExperimentAdapter):
    command = 'points'
    description = 'Superconvergence point sets for interpolation families and the PG scheme'
    defaults = {'family': 'legendre-gauss', 'n': 12, 'kind': 'rl', 'side': 'left'}

    def run(self, config: ExperimentConfig) -> ExperimentResult:
        interp = get_interp_settings()
        n = config.n if config.n is not None else int(interp['n'])
        defaults = get_pg_settings()['orders'] if config.scheme == 'pg-value' else interp['orders']
        orders = config.orders or [float(o) for o in defaults]
        rows, sets = [], []

        if config.scheme == 'pg-frac':
            sps = pg_fracderiv_superpoints(n)
            for order in (config.orders or [float('nan')]):
                rows.extend(_point_rows(sps, order))
                sets.append(sps)
        elif config.scheme == 'pg-value':
            for order in orders:
                sps = pg_value_superpoints(order, n, Side(config.side or 'right'))
                rows.extend(_point_rows(sps, order))
                sets.append(sps)
        else:
            family = NodeFamily(config.family or self.defaults['family'])
            for order in orders:
                spec = FracSpec(order, Side(config.side or 'left'), Kind(config.kind))
                sps = interp_superpoints(family, n, spec)
                rows.extend(_point_rows(sps, order))
                sets.append(sps)

        table = pd.DataFrame(rows, columns=['order', 'index', 'x'])
        summary = {
            'label': sets[0].label if sets else None,
            'N': n,
            'kind': config.kind,
            'sets': [
                {'order': s.order, 'count': len(s), 'includes_anchor': s.includes_anchor}
                for s in sets
            ],
        }
        meta = {'command': self.command, 'label': summary['label'], 'N': n}
        return ExperimentResult(table=table, summary=summary, meta=meta)
