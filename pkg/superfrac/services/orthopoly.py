"""
Jacobi / Legendre / Chebyshev machinery.

  - evaluation by the classical three-term recurrence (explicit hypergeometric
    sum when the recurrence degenerates, e.g. α+β = -2),
  - expansion in shifted powers (1+x)^k or (1-x)^k in extended precision,
  - Gauss-Jacobi rules by Golub-Welsch on the symmetric Jacobi matrix,
  - the eight collocation node families and their node polynomials.

Normalization is the standard one, P_n^{(α,β)}(1) = (α+1)_n / n!. Node
polynomials use the Legendre/Chebyshev combinations themselves
(L_{N+1} - L_{N-1}, L_{N+1} ± L_N, ...), so only their zero sets depend on
the convention.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import eigh_tridiagonal

from superfrac.config import MAX_POWER_DEGREE
from superfrac.exceptions import DegreeLimitError, DomainError
from superfrac.services.specialfn import ext, jacobi_mass

logger = logging.getLogger('services.orthopoly')


# ── Shared types ─────────────────────────────────────────────────────────────

class Side(Enum):
    """Interval end a fractional operator (or shifted power) is anchored at."""
    LEFT = 'left'
    RIGHT = 'right'

    @property
    def anchor_point(self) -> float:
        return -1.0 if self is Side.LEFT else 1.0

    @property
    def mirror(self) -> 'Side':
        return Side.RIGHT if self is Side.LEFT else Side.LEFT

    def distance(self, x):
        """Distance t from the anchor: 1+x on the left, 1-x on the right."""
        return 1.0 + x if self is Side.LEFT else 1.0 - x


@dataclass(frozen=True)
class JacobiParam:
    alpha: float
    beta: float

    def require_integrable(self):
        if not (self.alpha > -1 and self.beta > -1):
            raise DomainError(
                f"Quadrature needs alpha > -1 and beta > -1, got ({self.alpha}, {self.beta})"
            )

    def reflected(self) -> 'JacobiParam':
        """Parameters of P_n(-x) up to the (-1)^n factor."""
        return JacobiParam(self.beta, self.alpha)


def _as_output(x_in, values: np.ndarray):
    """Return a float for scalar input, the array otherwise."""
    if np.ndim(x_in) == 0:
        return float(values[0])
    return values


def _rising(z: float, m: int) -> float:
    out = 1.0
    for i in range(m):
        out *= z + i
    return out


# ── Jacobi evaluation ────────────────────────────────────────────────────────

def _recurrence_degenerates(alpha: float, beta: float, n: int) -> bool:
    apb = alpha + beta
    for k in range(2, n + 1):
        if k + apb == 0 or 2 * k + apb - 2 == 0:
            return True
    return False


def _explicit_coeffs(alpha: float, beta: float, n: int) -> List[float]:
    """c_m with P_n = Σ c_m ((x-1)/2)^m; polynomial in α, β so never degenerate."""
    apb = alpha + beta
    return [
        math.comb(n, m) * _rising(apb + n + 1, m) * _rising(alpha + m + 1, n - m) / math.factorial(n)
        for m in range(n + 1)
    ]


def _explicit_vandermonde(alpha: float, beta: float, n: int, x: np.ndarray) -> np.ndarray:
    u = (x - 1.0) / 2.0
    V = np.empty((x.size, n + 1))
    for j in range(n + 1):
        V[:, j] = np.polyval(_explicit_coeffs(alpha, beta, j)[::-1], u)
    return V


def jacobi_vandermonde(p: JacobiParam, n: int, x) -> np.ndarray:
    """Matrix V[i, k] = P_k^{(α,β)}(x_i), k = 0..n."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    a, b = p.alpha, p.beta
    if _recurrence_degenerates(a, b, n):
        logger.debug("Recurrence degenerates for (%s, %s, n=%s); using explicit sum", a, b, n)
        return _explicit_vandermonde(a, b, n, x)

    V = np.empty((x.size, n + 1))
    V[:, 0] = 1.0
    if n >= 1:
        V[:, 1] = 0.5 * ((a + b + 2.0) * x + (a - b))
    apb = a + b
    for k in range(2, n + 1):
        a1 = 2.0 * k * (k + apb) * (2.0 * k + apb - 2.0)
        a2 = (2.0 * k + apb - 1.0) * (a * a - b * b)
        a3 = (2.0 * k + apb - 2.0) * (2.0 * k + apb - 1.0) * (2.0 * k + apb)
        a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * (2.0 * k + apb)
        V[:, k] = ((a2 + a3 * x) * V[:, k - 1] - a4 * V[:, k - 2]) / a1
    return V


def jacobi_eval(p: JacobiParam, n: int, x):
    """P_n^{(α,β)}(x); scalar in, scalar out."""
    if n < 0:
        raise DomainError(f"Degree must be >= 0, got {n}")
    return _as_output(x, jacobi_vandermonde(p, n, x)[:, n])


def jacobi_deriv_eval(p: JacobiParam, n: int, x):
    """d/dx P_n^{(α,β)} = (n+α+β+1)/2 · P_{n-1}^{(α+1,β+1)}."""
    if n == 0:
        return _as_output(x, np.zeros(np.atleast_1d(x).size))
    shifted = JacobiParam(p.alpha + 1.0, p.beta + 1.0)
    scale = 0.5 * (n + p.alpha + p.beta + 1.0)
    return _as_output(x, scale * jacobi_vandermonde(shifted, n - 1, x)[:, n - 1])


@dataclass(frozen=True)
class JacobiSeries:
    """Σ c_n P_n^{(α,β)}(x) with one parameter pair for every term."""
    params: JacobiParam
    coeffs: Tuple[float, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def evaluate(self, x):
        V = jacobi_vandermonde(self.params, self.degree, x)
        return _as_output(x, V @ np.asarray(self.coeffs, dtype=float))

    def reflected(self) -> 'JacobiSeries':
        """Series for x -> q(-x)."""
        flipped = tuple(c if n % 2 == 0 else -c for n, c in enumerate(self.coeffs))
        return JacobiSeries(self.params.reflected(), flipped)

    def scaled(self, factor: float) -> 'JacobiSeries':
        return JacobiSeries(self.params, tuple(factor * c for c in self.coeffs))

    def with_constant_shift(self, delta: float) -> 'JacobiSeries':
        """Add delta·P_0 (P_0 ≡ 1)."""
        coeffs = list(self.coeffs)
        coeffs[0] += delta
        return JacobiSeries(self.params, tuple(coeffs))

    def single_term(self) -> Optional[int]:
        """Index of the only nonzero coefficient, if the series is a single term."""
        nonzero = [n for n, c in enumerate(self.coeffs) if c != 0.0]
        return nonzero[0] if len(nonzero) == 1 else None

    @classmethod
    def monomial(cls, params: JacobiParam, n: int, coefficient: float = 1.0) -> 'JacobiSeries':
        return cls(params, tuple([0.0] * n + [coefficient]))


# ── Chebyshev evaluation ─────────────────────────────────────────────────────

def chebyshev_vandermonde(n: int, x, second_kind: bool = False) -> np.ndarray:
    """V[i, k] = T_k(x_i) (or U_k), from their own recurrence so T_k(1) = 1."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    V = np.empty((x.size, n + 1))
    V[:, 0] = 1.0
    if n >= 1:
        V[:, 1] = 2.0 * x if second_kind else x
    for k in range(2, n + 1):
        V[:, k] = 2.0 * x * V[:, k - 1] - V[:, k - 2]
    return V


# ── Shifted power basis ──────────────────────────────────────────────────────

@dataclass(frozen=True)
class PowerBasisPoly:
    """
    Σ c_k t^k with t = 1+x (LEFT anchor) or t = 1-x (RIGHT anchor).

    Coefficients are mpmath numbers of the extended context; evaluation runs
    in that context and returns floats.
    """
    anchor: Side
    coeffs: Tuple

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def evaluate_ext(self, x):
        """Value at x as an extended-precision number."""
        t = ext.mpf(1) + ext.mpf(x) if self.anchor is Side.LEFT else ext.mpf(1) - ext.mpf(x)
        return self.evaluate_at_distance(t)

    def evaluate_at_distance(self, t):
        """Value at anchor distance t (extended precision)."""
        acc = ext.mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def evaluate(self, x):
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        values = np.array([float(self.evaluate_ext(float(xi))) for xi in xs])
        return _as_output(x, values)

    def to_floats(self) -> List[float]:
        return [float(c) for c in self.coeffs]

    def scaled(self, factor) -> 'PowerBasisPoly':
        f = ext.mpf(factor)
        return PowerBasisPoly(self.anchor, tuple(f * c for c in self.coeffs))

    def __add__(self, other: 'PowerBasisPoly') -> 'PowerBasisPoly':
        if other.anchor is not self.anchor:
            raise DomainError("Cannot add shifted-power polynomials with different anchors")
        size = max(len(self.coeffs), len(other.coeffs))
        zero = ext.mpf(0)
        a = list(self.coeffs) + [zero] * (size - len(self.coeffs))
        b = list(other.coeffs) + [zero] * (size - len(other.coeffs))
        return PowerBasisPoly(self.anchor, tuple(x + y for x, y in zip(a, b))).normalized()

    def normalized(self) -> 'PowerBasisPoly':
        """Drop trailing (highest-order) zeros, keeping at least one coefficient."""
        coeffs = list(self.coeffs)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        return PowerBasisPoly(self.anchor, tuple(coeffs))

    def reflected(self) -> 'PowerBasisPoly':
        """x -> p(-x): same coefficients, opposite anchor."""
        return PowerBasisPoly(self.anchor.mirror, self.coeffs)

    def t_derivative(self) -> 'PowerBasisPoly':
        """d/dt; equals d/dx on the left anchor and -d/dx on the right."""
        if self.degree == 0:
            return PowerBasisPoly(self.anchor, (ext.mpf(0),))
        return PowerBasisPoly(self.anchor, tuple(k * c for k, c in enumerate(self.coeffs) if k > 0))

    def x_derivative(self) -> 'PowerBasisPoly':
        d = self.t_derivative()
        return d if self.anchor is Side.LEFT else d.scaled(-1)

    @classmethod
    def from_floats(cls, anchor: Side, coeffs: Sequence[float]) -> 'PowerBasisPoly':
        return cls(anchor, tuple(ext.mpf(c) for c in coeffs))


def _times_x(anchor: Side, v: List) -> List:
    """Multiply a t-coefficient vector by x = t-1 (left) or x = 1-t (right)."""
    shifted = [ext.mpf(0)] + list(v)
    padded = list(v) + [ext.mpf(0)]
    if anchor is Side.LEFT:
        return [s - p for s, p in zip(shifted, padded)]
    return [p - s for s, p in zip(shifted, padded)]


def _axpy(a, v: List, b, w: List) -> List:
    size = max(len(v), len(w))
    zero = ext.mpf(0)
    v = list(v) + [zero] * (size - len(v))
    w = list(w) + [zero] * (size - len(w))
    return [a * vi + b * wi for vi, wi in zip(v, w)]


def _check_power_degree(n: int):
    if n > MAX_POWER_DEGREE:
        raise DegreeLimitError(n, MAX_POWER_DEGREE)


def jacobi_power_coeffs_explicit(p: JacobiParam, n: int, anchor: Side) -> PowerBasisPoly:
    """Shifted-power coefficients straight from the hypergeometric sum."""
    _check_power_degree(n)
    # Left anchor goes through P_n^{(α,β)}(x) = (-1)^n P_n^{(β,α)}(-x)
    a, b = (ext.mpf(p.alpha), ext.mpf(p.beta)) if anchor is Side.RIGHT else (ext.mpf(p.beta), ext.mpf(p.alpha))
    parity = 1 if anchor is Side.RIGHT or n % 2 == 0 else -1
    coeffs = []
    for m in range(n + 1):
        c = ext.binomial(n, m) * ext.rf(a + b + n + 1, m) * ext.rf(a + m + 1, n - m) / ext.factorial(n)
        coeffs.append(parity * c * (ext.mpf(-1) / 2) ** m)
    return PowerBasisPoly(anchor, tuple(coeffs))


def jacobi_power_coeffs(p: JacobiParam, n: int, anchor: Side) -> PowerBasisPoly:
    """
    P_n^{(α,β)} in powers of (1+x) or (1-x), by running the three-term
    recurrence on coefficient vectors in extended precision.
    """
    _check_power_degree(n)
    if _recurrence_degenerates(p.alpha, p.beta, n):
        return jacobi_power_coeffs_explicit(p, n, anchor)

    a, b = ext.mpf(p.alpha), ext.mpf(p.beta)
    apb = a + b
    prev = [ext.mpf(1)]
    if n == 0:
        return PowerBasisPoly(anchor, tuple(prev))
    # P_1 = ((α+β+2) x + (α-β)) / 2
    cur = _axpy((apb + 2) / 2, _times_x(anchor, prev), (a - b) / 2, prev)
    for k in range(2, n + 1):
        a1 = 2 * k * (k + apb) * (2 * k + apb - 2)
        a2 = (2 * k + apb - 1) * (a * a - b * b)
        a3 = (2 * k + apb - 2) * (2 * k + apb - 1) * (2 * k + apb)
        a4 = 2 * (k + a - 1) * (k + b - 1) * (2 * k + apb)
        nxt = _axpy(a3 / a1, _times_x(anchor, cur), a2 / a1, cur)
        nxt = _axpy(1, nxt, -a4 / a1, prev)
        prev, cur = cur, nxt
    return PowerBasisPoly(anchor, tuple(cur))


def chebyshev_power_coeffs(n: int, anchor: Side) -> PowerBasisPoly:
    """T_n in powers of (1+x) or (1-x)."""
    _check_power_degree(n)
    prev = [ext.mpf(1)]
    if n == 0:
        return PowerBasisPoly(anchor, tuple(prev))
    cur = _times_x(anchor, prev)
    for _ in range(2, n + 1):
        prev, cur = cur, _axpy(2, _times_x(anchor, cur), -1, prev)
    return PowerBasisPoly(anchor, tuple(cur))


# ── Gauss-Jacobi quadrature ──────────────────────────────────────────────────

@dataclass(frozen=True)
class QuadRule:
    params: JacobiParam
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, f: Callable) -> float:
        """∫ (1-x)^α (1+x)^β f(x) dx."""
        values = np.broadcast_to(np.asarray(f(self.nodes), dtype=float), self.nodes.shape)
        return float(np.dot(self.weights, values))


def _jacobi_matrix(alpha: float, beta: float, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Diagonal and off-diagonal of the symmetric Jacobi matrix."""
    apb = alpha + beta
    diag = np.empty(n)
    diag[0] = (beta - alpha) / (apb + 2.0)
    for k in range(1, n):
        diag[k] = (beta * beta - alpha * alpha) / ((2 * k + apb) * (2 * k + apb + 2.0))
    off = np.empty(max(n - 1, 0))
    if n > 1:
        off[0] = math.sqrt(4.0 * (1 + alpha) * (1 + beta) / ((2.0 + apb) ** 2 * (3.0 + apb)))
    for k in range(2, n):
        num = 4.0 * k * (k + alpha) * (k + beta) * (k + apb)
        den = (2 * k + apb) ** 2 * (2 * k + apb + 1.0) * (2 * k + apb - 1.0)
        off[k - 1] = math.sqrt(num / den)
    return diag, off


def _newton_polish(p: JacobiParam, n: int, x: np.ndarray) -> np.ndarray:
    step = np.atleast_1d(jacobi_eval(p, n, x)) / np.atleast_1d(jacobi_deriv_eval(p, n, x))
    small = np.abs(step) < 1e-8
    return np.where(small, x - step, x)


def gauss_jacobi_rule(p: JacobiParam, n: int) -> QuadRule:
    """n-point Gauss rule for the weight (1-x)^α (1+x)^β (Golub-Welsch)."""
    p.require_integrable()
    if n < 1:
        raise DomainError(f"Quadrature needs n >= 1 points, got {n}")
    mass = jacobi_mass(p.alpha, p.beta)
    diag, off = _jacobi_matrix(p.alpha, p.beta, n)
    if n == 1:
        return QuadRule(p, np.array([diag[0]]), np.array([mass]))

    nodes, vectors = eigh_tridiagonal(diag, off)
    order = np.argsort(nodes)
    nodes = _newton_polish(p, n, nodes[order])
    weights = mass * vectors[0, order] ** 2
    return QuadRule(p, nodes, weights)


def _newton_roots(p: JacobiParam, n: int, tol: float = 1e-15, max_iter: int = 100) -> np.ndarray:
    """Roots by Newton with deflation from Chebyshev initial guesses."""
    roots: List[float] = []
    for k in range(n):
        r = -math.cos((2.0 * k + 1.0) * math.pi / (2.0 * n))
        if k > 0:
            r = 0.5 * (r + roots[k - 1])
        for _ in range(max_iter):
            s = sum(1.0 / (r - xi) for xi in roots)
            f = jacobi_eval(p, n, r)
            fp = jacobi_deriv_eval(p, n, r)
            delta = f / (fp - f * s)
            r -= delta
            if abs(delta) < tol:
                break
        roots.append(r)
    return np.sort(np.array(roots))


def jacobi_roots(p: JacobiParam, n: int, method: str = 'golub-welsch') -> np.ndarray:
    """The n zeros of P_n^{(α,β)} in (-1, 1), ascending."""
    if n == 0:
        return np.array([])
    if method == 'golub-welsch':
        return gauss_jacobi_rule(p, n).nodes
    if method == 'newton':
        p.require_integrable()
        return _newton_roots(p, n)
    raise DomainError(f"Unknown root method '{method}'")


# ── Node families ────────────────────────────────────────────────────────────

class NodeFamily(Enum):
    LEGENDRE_GAUSS = 'legendre-gauss'
    LEGENDRE_LOBATTO = 'legendre-lobatto'
    LEGENDRE_RADAU_LEFT = 'legendre-radau-left'
    LEGENDRE_RADAU_RIGHT = 'legendre-radau-right'
    CHEBYSHEV_GAUSS = 'chebyshev-gauss'
    CHEBYSHEV_LOBATTO = 'chebyshev-lobatto'
    CHEBYSHEV_RADAU_LEFT = 'chebyshev-radau-left'
    CHEBYSHEV_RADAU_RIGHT = 'chebyshev-radau-right'

    @property
    def basis(self) -> str:
        return self.value.split('-', 1)[0]

    @property
    def kind(self) -> str:
        return self.value.split('-', 1)[1]

    @property
    def is_legendre(self) -> bool:
        return self.basis == 'legendre'

    @property
    def mirror(self) -> 'NodeFamily':
        swap = {'radau-left': 'radau-right', 'radau-right': 'radau-left'}
        return NodeFamily(f"{self.basis}-{swap.get(self.kind, self.kind)}")

    def vanishes_at(self, side: Side) -> bool:
        """Whether the node polynomial has a zero at the given endpoint."""
        if self.kind == 'lobatto':
            return True
        return self.kind == f"radau-{side.value}"


def node_poly_terms(family: NodeFamily, N: int) -> List[Tuple[float, int]]:
    """w_{N+1} as (coefficient, degree) pairs over L_n or T_n."""
    if N < 1:
        raise DomainError(f"Node families need N >= 1, got {N}")
    return {
        'gauss': [(1.0, N + 1)],
        'lobatto': [(1.0, N + 1), (-1.0, N - 1)],
        'radau-left': [(1.0, N + 1), (1.0, N)],
        'radau-right': [(1.0, N + 1), (-1.0, N)],
    }[family.kind]


def node_poly_eval(family: NodeFamily, N: int, x, derivative: bool = False):
    """w_{N+1}(x), or its first derivative."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    terms = node_poly_terms(family, N)
    values = np.zeros(xs.size)
    if family.is_legendre:
        legendre = JacobiParam(0.0, 0.0)
        for coef, deg in terms:
            col = jacobi_deriv_eval(legendre, deg, xs) if derivative else jacobi_eval(legendre, deg, xs)
            values += coef * np.atleast_1d(col)
    else:
        T = chebyshev_vandermonde(N + 1, xs)
        U = chebyshev_vandermonde(N + 1, xs, second_kind=True)
        for coef, deg in terms:
            # T_n' = n U_{n-1}
            col = deg * U[:, deg - 1] if derivative else T[:, deg]
            values += coef * col
    return _as_output(x, values)


def node_poly_power(family: NodeFamily, N: int, anchor: Side) -> PowerBasisPoly:
    """w_{N+1} in shifted powers about the given anchor."""
    poly = None
    for coef, deg in node_poly_terms(family, N):
        if family.is_legendre:
            term = jacobi_power_coeffs(JacobiParam(0.0, 0.0), deg, anchor)
        else:
            term = chebyshev_power_coeffs(deg, anchor)
        term = term.scaled(coef)
        poly = term if poly is None else poly + term
    return poly


def _legendre_points(kind: str, N: int) -> np.ndarray:
    if kind == 'gauss':
        return jacobi_roots(JacobiParam(0.0, 0.0), N + 1)
    if kind == 'lobatto':
        inner = jacobi_roots(JacobiParam(1.0, 1.0), N - 1)
        return np.concatenate(([-1.0], inner, [1.0]))
    if kind == 'radau-left':
        # L_{N+1} + L_N = (1+x) P_N^{(0,1)}
        return np.concatenate(([-1.0], jacobi_roots(JacobiParam(0.0, 1.0), N)))
    # L_{N+1} - L_N = -(1-x) P_N^{(1,0)}
    return np.concatenate((jacobi_roots(JacobiParam(1.0, 0.0), N), [1.0]))


def _chebyshev_points(kind: str, N: int) -> np.ndarray:
    j = np.arange(N + 1)
    theta = {
        'gauss': (2 * j + 1) * np.pi / (2 * N + 2),
        'lobatto': j * np.pi / N,
        'radau-left': (2 * j + 1) * np.pi / (2 * N + 1),
        'radau-right': 2 * j * np.pi / (2 * N + 1),
    }[kind]
    return np.sort(np.cos(theta))


def node_family_points(family: NodeFamily, N: int) -> np.ndarray:
    """The N+1 zeros of w_{N+1}, ascending; endpoints included where w vanishes."""
    if N < 1:
        raise DomainError(f"Node families need N >= 1, got {N}")
    if family.is_legendre:
        return _legendre_points(family.kind, N)
    points = _chebyshev_points(family.kind, N)
    # cos() leaves ~1e-16 residue at the exact endpoints
    points[np.isclose(points, -1.0, rtol=0, atol=1e-14)] = -1.0
    points[np.isclose(points, 1.0, rtol=0, atol=1e-14)] = 1.0
    return points


# ── Legendre projection ──────────────────────────────────────────────────────

def legendre_expand(f: Callable, N: int, quad_points: int) -> np.ndarray:
    """f̃_n = (2n+1)/2 ∫ f L_n, n = 0..N, by a quad_points Gauss-Legendre rule."""
    if quad_points < N + 1:
        raise DomainError(f"quad_points={quad_points} must be >= N+1={N + 1}")
    rule = gauss_jacobi_rule(JacobiParam(0.0, 0.0), quad_points)
    values = np.broadcast_to(np.asarray(f(rule.nodes), dtype=float), rule.nodes.shape)
    V = jacobi_vandermonde(JacobiParam(0.0, 0.0), N, rule.nodes)
    scale = (2.0 * np.arange(N + 1) + 1.0) / 2.0
    return scale * (V.T @ (rule.weights * values))
