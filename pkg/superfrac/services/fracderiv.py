"""
Fractional derivatives of polynomials and generalized Jacobi functions.

Two independent routes produce every result:

  - shifted-power rule: c_k t^k -> c_k Γ(k+1)/Γ(k+1-μ) t^{k-μ}, t = 1±x,
    carried in extended precision,
  - Jacobi closed forms: D^μ[(1+x)^b P_n^{(a,b)}] =
    Γ(n+b+1)/Γ(n+b+1-μ) (1+x)^{b-μ} P_n^{(a+μ,b-μ)} on the left, and its
    mirror image on the right.

A Gauss-Jacobi quadrature oracle evaluates the Caputo integral directly for
any smooth function and pins both routes.

The right-sided derivative is defined for x < 1 (anchor +1). In the
distance variable t both sides share one power rule.
"""
import functools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Union

import numpy as np

from superfrac.exceptions import (
    DomainError,
    SideMismatchError,
    SingularEvaluationError,
    UnsupportedPairingError,
)
from superfrac.services.orthopoly import (
    JacobiParam,
    JacobiSeries,
    NodeFamily,
    PowerBasisPoly,
    Side,
    _as_output,
    gauss_jacobi_rule,
    node_poly_eval,
    node_poly_power,
)
from superfrac.services.specialfn import ext, gamma_ratio, rgamma

logger = logging.getLogger('services.fracderiv')

# Relative size below which a leading power coefficient counts as zero
_POWER_ZERO_RTOL = ext.mpf(10) ** (-(ext.dps - 10))

# |q(anchor)| below this (relative to the coefficient size) is a removable singularity
_ANCHOR_ZERO_RTOL = 1e-10

# Default minimum anchor distance for the quadrature oracle
ORACLE_MIN_DISTANCE = 1e-10


# ── Operator description ─────────────────────────────────────────────────────

class Kind(Enum):
    RL = 'rl'
    CAPUTO = 'caputo'


@dataclass(frozen=True)
class FracSpec:
    """Order, side and kind of a fractional operator."""
    order: float
    side: Side = Side.LEFT
    kind: Kind = Kind.RL

    def __post_init__(self):
        if not 0.0 < self.order <= 1.0:
            raise DomainError(f"Fractional order must lie in (0, 1], got {self.order}")

    @property
    def is_classical(self) -> bool:
        return self.order == 1.0

    def mirrored(self) -> 'FracSpec':
        return FracSpec(self.order, self.side.mirror, self.kind)


Factor = Union[PowerBasisPoly, JacobiSeries]


@dataclass(frozen=True)
class SingularPoly:
    """
    scale · (1±x)^ρ · q(x), with the sign chosen by the anchor.

    q is kept either in shifted powers (exact substrate) or as a Jacobi series
    (closed forms); ρ stays symbolic.
    """
    anchor: Side
    singular_exponent: float
    poly: Factor
    scale: float = 1.0

    def factor_values(self, x):
        """q(x) without the singular factor or the scale."""
        return self.poly.evaluate(x)

    def factor_at_anchor(self) -> float:
        return float(self.poly.evaluate(self.anchor.anchor_point))

    def _coefficient_size(self) -> float:
        if isinstance(self.poly, PowerBasisPoly):
            return max(abs(float(c)) for c in self.poly.coeffs)
        return max(abs(c) for c in self.poly.coeffs)

    def vanishes_at_anchor(self) -> bool:
        if self.singular_exponent > 0:
            return True
        size = self._coefficient_size()
        return abs(self.factor_at_anchor()) <= _ANCHOR_ZERO_RTOL * max(size, 1e-300)

    def value_at_anchor(self) -> float:
        rho = self.singular_exponent
        if rho > 0:
            return 0.0
        q_anchor = self.factor_at_anchor()
        if rho == 0:
            return self.scale * q_anchor
        if self.vanishes_at_anchor():
            # (1±x)^ρ q with q(anchor) = 0 and ρ > -1 tends to 0
            if rho > -1:
                return 0.0
        raise SingularEvaluationError(
            f"Singular exponent {rho} at anchor {self.anchor.anchor_point} with q(anchor)={q_anchor:.3e}"
        )

    def evaluate(self, x):
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        t = self.anchor.distance(xs)
        if np.any(t < 0):
            raise DomainError(f"Evaluation outside [-1, 1] for anchor {self.anchor.value}")
        out = np.empty(xs.size)
        interior = t > 0
        if np.any(interior):
            q = np.atleast_1d(self.factor_values(xs[interior]))
            out[interior] = self.scale * np.power(t[interior], self.singular_exponent) * q
        if not np.all(interior):
            out[~interior] = self.value_at_anchor()
        return _as_output(x, out)

    def reflected(self) -> 'SingularPoly':
        """x -> value at -x: opposite anchor, reflected factor."""
        return SingularPoly(self.anchor.mirror, self.singular_exponent, self.poly.reflected(), self.scale)

    def scaled(self, factor: float) -> 'SingularPoly':
        return SingularPoly(self.anchor, self.singular_exponent, self.poly, self.scale * factor)


@dataclass(frozen=True)
class SmoothFunction:
    """A scalar function on [-1, 1] with its first derivative, both vectorized."""
    value: Callable
    derivative: Callable

    def reflected(self) -> 'SmoothFunction':
        return SmoothFunction(
            value=lambda x: self.value(-np.asarray(x)),
            derivative=lambda x: -np.asarray(self.derivative(-np.asarray(x))),
        )


# ── Shifted-power route ──────────────────────────────────────────────────────

def _strip_low_order(anchor: Side, rho: float, coeffs: list) -> SingularPoly:
    """Factor t^j out of leading zero coefficients, raising ρ by j."""
    size = max((abs(c) for c in coeffs), default=ext.mpf(0))
    if size == 0:
        return SingularPoly(anchor, 0.0, PowerBasisPoly(anchor, (ext.mpf(0),)))
    shift = 0
    while abs(coeffs[shift]) <= _POWER_ZERO_RTOL * size:
        shift += 1
    poly = PowerBasisPoly(anchor, tuple(coeffs[shift:])).normalized()
    return SingularPoly(anchor, rho + shift, poly)


def _power_rule(anchor: Side, rho: float, coeffs, order: float, drop_constant: bool) -> SingularPoly:
    """Apply D^order termwise to Σ c_k t^{k+ρ}."""
    mu = ext.mpf(order)
    r = ext.mpf(rho)
    mapped = []
    for k, c in enumerate(coeffs):
        if drop_constant and k == 0:
            mapped.append(ext.mpf(0))
            continue
        mapped.append(c * ext.gamma(k + r + 1) * ext.rgamma(k + r + 1 - mu))
    return _strip_low_order(anchor, rho - order, mapped)


def frac_deriv_power(poly: PowerBasisPoly, spec: FracSpec) -> SingularPoly:
    """D^μ of a shifted-power polynomial anchored on the operator's side."""
    if poly.anchor is not spec.side:
        raise SideMismatchError(
            f"Polynomial anchored {poly.anchor.value} cannot take a {spec.side.value} derivative"
        )
    return _power_rule(poly.anchor, 0.0, poly.coeffs, spec.order, spec.kind is Kind.CAPUTO)


def frac_deriv_singular(sp: SingularPoly, spec: FracSpec) -> SingularPoly:
    """D^μ of t^ρ · q(t) for ρ > -1 and q in shifted powers."""
    if not isinstance(sp.poly, PowerBasisPoly):
        raise DomainError("frac_deriv_singular needs a shifted-power factor")
    if sp.anchor is not spec.side:
        raise SideMismatchError(
            f"Function anchored {sp.anchor.value} cannot take a {spec.side.value} derivative"
        )
    rho = sp.singular_exponent
    if rho <= -1:
        raise DomainError(f"Power rule needs an integrable exponent, got {rho}")
    if spec.kind is Kind.CAPUTO and rho < 0:
        raise DomainError("Caputo derivative undefined for a function singular at the anchor")
    coeffs = [ext.mpf(sp.scale) * c for c in sp.poly.coeffs]
    drop = spec.kind is Kind.CAPUTO and rho == 0
    return _power_rule(sp.anchor, rho, coeffs, spec.order, drop)


def frac_integral_power(f: Union[PowerBasisPoly, SingularPoly], order: float, side: Side = None) -> SingularPoly:
    """Riemann-Liouville integral I^ν of t^ρ q(t), ν > 0."""
    if not order > 0:
        raise DomainError(f"Integral order must be positive, got {order}")
    if isinstance(f, PowerBasisPoly):
        f = SingularPoly(f.anchor, 0.0, f)
    if side is not None and side is not f.anchor:
        raise SideMismatchError(f"Function anchored {f.anchor.value} cannot take a {side.value} integral")
    if not isinstance(f.poly, PowerBasisPoly):
        raise DomainError("frac_integral_power needs a shifted-power factor")
    if f.singular_exponent <= -1:
        raise DomainError(f"Integral needs an integrable exponent, got {f.singular_exponent}")
    nu = ext.mpf(order)
    r = ext.mpf(f.singular_exponent)
    mapped = [
        ext.mpf(f.scale) * c * ext.gamma(k + r + 1) * ext.rgamma(k + r + 1 + nu)
        for k, c in enumerate(f.poly.coeffs)
    ]
    return _strip_low_order(f.anchor, f.singular_exponent + order, mapped)


# ── Closed forms for node polynomials ────────────────────────────────────────

_LEFT_CLOSED_FORMS = {'gauss', 'lobatto', 'radau-left'}


def _left_closed_form(family: NodeFamily, N: int, spec: FracSpec) -> SingularPoly:
    mu = spec.order
    coefficient = gamma_ratio(N + 2.0, N + 2.0 - mu)
    kind = family.kind
    if kind == 'gauss':
        # L_{N+1} = (1+x)^0 P_{N+1}^{(0,0)}
        q = JacobiSeries.monomial(JacobiParam(mu, -mu), N + 1)
        sp = SingularPoly(Side.LEFT, -mu, q, coefficient)
        if spec.kind is Kind.CAPUTO:
            # subtract w(-1) (1+x)^{-μ} / Γ(1-μ)
            w_start = (-1.0) ** (N + 1)
            sp = SingularPoly(Side.LEFT, -mu, q.with_constant_shift(-w_start * rgamma(1.0 - mu) / coefficient),
                              coefficient)
        return sp
    if kind == 'radau-left':
        # L_{N+1} + L_N = (1+x) P_N^{(0,1)}
        q = JacobiSeries.monomial(JacobiParam(mu, 1.0 - mu), N)
        return SingularPoly(Side.LEFT, 1.0 - mu, q, coefficient)
    # L_{N+1} - L_{N-1} = (2N+1)/(N+1) (1+x) P_N^{(-1,1)}
    q = JacobiSeries.monomial(JacobiParam(mu - 1.0, 1.0 - mu), N)
    return SingularPoly(Side.LEFT, 1.0 - mu, q, coefficient * (2.0 * N + 1.0) / (N + 1.0))


def closed_form_available(family: NodeFamily, side: Side) -> bool:
    if not family.is_legendre:
        return False
    kind = family.kind if side is Side.LEFT else family.mirror.kind
    return kind in _LEFT_CLOSED_FORMS


def frac_deriv_node_poly(family: NodeFamily, N: int, spec: FracSpec) -> SingularPoly:
    """
    D^μ w_{N+1} for a node family.

    Legendre families use the Jacobi closed forms (right side through
    w_F(x) = (-1)^{N+1} w_{F'}(-x) with F' the mirror family); Chebyshev
    families go through the shifted-power route.
    """
    if N < 1:
        raise DomainError(f"Node families need N >= 1, got {N}")
    if not family.is_legendre:
        return frac_deriv_power(node_poly_power(family, N, spec.side), spec)
    if not closed_form_available(family, spec.side):
        raise UnsupportedPairingError(
            f"No closed form for {family.value} with a {spec.side.value} derivative"
        )
    if spec.side is Side.LEFT:
        return _left_closed_form(family, N, spec)
    mirrored = _left_closed_form(family.mirror, N, spec.mirrored())
    return mirrored.reflected().scaled((-1.0) ** (N + 1))


def frac_deriv_node_poly_power(family: NodeFamily, N: int, spec: FracSpec) -> SingularPoly:
    """D^μ w_{N+1} through the shifted-power route, any family and side."""
    return frac_deriv_power(node_poly_power(family, N, spec.side), spec)


# ── Generalized Jacobi functions ─────────────────────────────────────────────

class GjfVariant(Enum):
    PLUS = 'plus'    # (1-x)^α P_n^{(α,β)}
    MINUS = 'minus'  # (1+x)^β P_n^{(α,β)}


@dataclass(frozen=True)
class GjfBasisId:
    variant: GjfVariant
    alpha: float
    beta: float
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise DomainError(f"GJF degree must be >= 0, got {self.n}")
        weight_exponent = self.alpha if self.variant is GjfVariant.PLUS else self.beta
        if not weight_exponent > -1:
            raise DomainError(f"GJF weight exponent must exceed -1, got {weight_exponent}")

    @property
    def params(self) -> JacobiParam:
        return JacobiParam(self.alpha, self.beta)

    def as_singular(self) -> SingularPoly:
        series = JacobiSeries.monomial(self.params, self.n)
        if self.variant is GjfVariant.PLUS:
            return SingularPoly(Side.RIGHT, self.alpha, series)
        return SingularPoly(Side.LEFT, self.beta, series)


def gjf_eval(gid: GjfBasisId, x):
    return gid.as_singular().evaluate(x)


@dataclass(frozen=True)
class GjfDerivative:
    """coefficient · P_n^{image}(x): the image of a GJF under its matching RL derivative."""
    coefficient: float
    image: JacobiParam
    n: int
    order: float
    side: Side

    def evaluate(self, x):
        return self.as_series().evaluate(x)

    def as_series(self) -> JacobiSeries:
        return JacobiSeries.monomial(self.image, self.n, self.coefficient)


def gjf_frac_deriv(gid: GjfBasisId) -> GjfDerivative:
    """
    Right RL derivative of order α of (1-x)^α P_n^{(α,β)} is Γ(n+α+1)/n! P_n^{(0,α+β)};
    left RL derivative of order β of (1+x)^β P_n^{(α,β)} is Γ(n+β+1)/n! P_n^{(α+β,0)}.
    """
    n = gid.n
    if gid.variant is GjfVariant.PLUS:
        if not gid.alpha > 0:
            raise DomainError(f"Right GJF derivative needs alpha > 0, got {gid.alpha}")
        return GjfDerivative(gamma_ratio(n + gid.alpha + 1.0, n + 1.0),
                             JacobiParam(0.0, gid.alpha + gid.beta), n, gid.alpha, Side.RIGHT)
    if not gid.beta > 0:
        raise DomainError(f"Left GJF derivative needs beta > 0, got {gid.beta}")
    return GjfDerivative(gamma_ratio(n + gid.beta + 1.0, n + 1.0),
                         JacobiParam(gid.alpha + gid.beta, 0.0), n, gid.beta, Side.LEFT)


# ── Quadrature oracle ────────────────────────────────────────────────────────

@functools.lru_cache(maxsize=32)
def _oracle_rule(order: float, points: int):
    return gauss_jacobi_rule(JacobiParam(-order, 0.0), points)


def _left_oracle(f: SmoothFunction, f_at_start: float, order: float, kind: Kind, x: float, points: int,
                 min_distance: float) -> float:
    dist = 1.0 + x
    if dist < min_distance:
        raise SingularEvaluationError(f"Oracle evaluation at distance {dist:.1e} from the anchor")
    rule = _oracle_rule(order, points)
    # s = x - (1+x)(1-τ)/2 maps τ ∈ [-1, 1] onto [-1, x]
    s = x - dist * (1.0 - rule.nodes) / 2.0
    integral = float(np.dot(rule.weights, np.asarray(f.derivative(s), dtype=float)))
    inv_gamma = rgamma(1.0 - order)
    value = (dist / 2.0) ** (1.0 - order) * integral * inv_gamma
    if kind is Kind.RL:
        value += f_at_start * dist ** (-order) * inv_gamma
    return value


def oracle_frac_deriv(f: SmoothFunction, f_at_start: float, spec: FracSpec, x, points: int = 128,
                      min_distance: float = ORACLE_MIN_DISTANCE):
    """
    D^μ f(x) from the Caputo integral on a Gauss-Jacobi rule with weight
    (1-τ)^{-μ}; RL adds f(start)(dist)^{-μ}/Γ(1-μ). Right side by reflection.
    Points closer than min_distance to the anchor raise SingularEvaluationError.
    """
    if spec.is_classical:
        raise DomainError("Quadrature oracle needs order in (0, 1)")
    if spec.side is Side.RIGHT:
        f = f.reflected()
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if spec.side is Side.RIGHT:
        xs = -xs
    values = np.array([
        _left_oracle(f, f_at_start, spec.order, spec.kind, float(xi), points, min_distance) for xi in xs
    ])
    return _as_output(x, values)


def node_poly_function(family: NodeFamily, N: int) -> SmoothFunction:
    """w_{N+1} and w'_{N+1} packaged for the oracle."""
    return SmoothFunction(
        value=lambda x: node_poly_eval(family, N, x),
        derivative=lambda x: node_poly_eval(family, N, x, derivative=True),
    )
