"""
Benchmark functions and right-hand sides.

Interpolation targets are finite sums of (1±x)^p terms so their fractional
derivatives are known exactly by the power rule. Petrov-Galerkin right-hand
sides may be arbitrary smooth callables; some carry an exact solution.

Function ids accepted on the command line:
    builtin:<name> or <name>      registry entry (ex31, ex41, ex42, ex43, remark45)
    legendre:<m>                  L_m
    c*(1+x)^p + c*(1-x)^q ...     power-sum expression
"""
import logging
import re
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from superfrac.exceptions import ConfigError, DomainError
from superfrac.services.fracderiv import FracSpec, Kind, SmoothFunction, oracle_frac_deriv
from superfrac.services.orthopoly import JacobiParam, PowerBasisPoly, Side, jacobi_eval, jacobi_power_coeffs
from superfrac.services.specialfn import gamma_ratio

logger = logging.getLogger('services.functions')


# ── Power sums ───────────────────────────────────────────────────────────────

def _power_rule_coefficient(p: float, mu: float) -> float:
    """Γ(p+1)/Γ(p+1-μ), zero where the denominator has a pole."""
    denominator = p + 1.0 - mu
    if denominator <= 0 and float(denominator).is_integer():
        return 0.0
    return gamma_ratio(p + 1.0, denominator)


@dataclass(frozen=True)
class PowerTerm:
    """coefficient · (1+x)^exponent (LEFT) or coefficient · (1-x)^exponent (RIGHT)."""
    coefficient: float
    side: Side
    exponent: float

    def value(self, x):
        return self.coefficient * np.power(self.side.distance(np.asarray(x, dtype=float)), self.exponent)

    def derivative(self, x):
        if self.exponent == 0:
            return np.zeros_like(np.asarray(x, dtype=float))
        sign = 1.0 if self.side is Side.LEFT else -1.0
        t = self.side.distance(np.asarray(x, dtype=float))
        return sign * self.coefficient * self.exponent * np.power(t, self.exponent - 1.0)

    def at_anchor(self) -> float:
        """Value at the term's own anchor (t = 0)."""
        if self.exponent > 0:
            return 0.0
        if self.exponent == 0:
            return self.coefficient
        raise DomainError(f"Term {self} is singular at its anchor")

    def frac_deriv(self, spec: FracSpec, x):
        x = np.asarray(x, dtype=float)
        if spec.side is self.side:
            if spec.kind is Kind.CAPUTO and self.exponent == 0:
                return np.zeros_like(x)
            t = self.side.distance(x)
            factor = _power_rule_coefficient(self.exponent, spec.order)
            return self.coefficient * factor * np.power(t, self.exponent - spec.order)
        # Opposite anchor: no closed form, integrate directly
        smooth = SmoothFunction(value=self.value, derivative=self.derivative)
        start = float(self.value(spec.side.anchor_point))
        return oracle_frac_deriv(smooth, start, spec, x)


@dataclass(frozen=True)
class PowerSum:
    """Σ c_i (1±x)^{p_i}."""
    terms: Tuple[PowerTerm, ...]
    label: str = ''

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return sum((term.value(x) for term in self.terms), np.zeros_like(x))

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        return sum((term.derivative(x) for term in self.terms), np.zeros_like(x))

    def __call__(self, x):
        return self.value(x)

    def as_smooth(self) -> SmoothFunction:
        return SmoothFunction(value=self.value, derivative=self.derivative)

    def frac_deriv(self, spec: FracSpec, x):
        x = np.asarray(x, dtype=float)
        if spec.is_classical:
            sign = 1.0 if spec.side is Side.LEFT else -1.0
            return sign * self.derivative(x)
        return sum((term.frac_deriv(spec, x) for term in self.terms), np.zeros_like(x))

    def is_polynomial_of_degree(self, N: int) -> bool:
        return all(float(t.exponent).is_integer() and 0 <= t.exponent <= N for t in self.terms)

    @classmethod
    def from_power_poly(cls, poly: PowerBasisPoly, label: str = '') -> 'PowerSum':
        terms = tuple(
            PowerTerm(float(c), poly.anchor, float(k)) for k, c in enumerate(poly.coeffs) if c != 0
        )
        return cls(terms, label)


_NUMBER = r'[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?'
_TERM_RE = re.compile(
    rf'^(?:(?P<coef>{_NUMBER})\s*\*\s*)?\(\s*1\s*(?P<sign>[+-])\s*x\s*\)\s*(?:\^|\*\*)\s*(?P<exp>{_NUMBER})$'
)
_CONST_RE = re.compile(rf'^{_NUMBER}$')


def _split_terms(text: str):
    """Split on top-level + and - (not inside parentheses or exponents)."""
    terms, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == '(':
            depth += 1
        elif ch == ')':
            depth -= 1
        elif ch in '+-' and depth == 0 and i > start:
            prev = text[i - 1]
            if prev not in 'eE^*':
                terms.append(text[start:i])
                start = i
    terms.append(text[start:])
    return [t.strip() for t in terms if t.strip()]


def parse_power_sum(text: str) -> PowerSum:
    """
    Parse "c*(1+x)^p + c*(1-x)^q + c" into a PowerSum.

    A leading sign applies to the coefficient; a bare number is a constant term.
    """
    cleaned = text.replace(' ', '')
    if not cleaned:
        raise ConfigError("Empty function expression")
    terms = []
    for chunk in _split_terms(cleaned):
        sign = 1.0
        body = chunk
        if body[0] in '+-' and not _CONST_RE.match(body):
            sign = -1.0 if body[0] == '-' else 1.0
            body = body[1:]
        if _CONST_RE.match(body):
            terms.append(PowerTerm(sign * float(body), Side.LEFT, 0.0))
            continue
        match = _TERM_RE.match(body)
        if not match:
            raise ConfigError(f"Cannot parse term '{chunk}' in '{text}'")
        coefficient = float(match.group('coef')) if match.group('coef') else 1.0
        side = Side.LEFT if match.group('sign') == '+' else Side.RIGHT
        exponent = float(match.group('exp'))
        if exponent < 0:
            raise ConfigError(f"Negative exponent in '{chunk}' is not supported")
        terms.append(PowerTerm(sign * coefficient, side, exponent))
    return PowerSum(tuple(terms), label=text)


def legendre_function(m: int) -> PowerSum:
    """L_m as a power sum about x = -1."""
    poly = jacobi_power_coeffs(JacobiParam(0.0, 0.0), m, Side.LEFT)
    return PowerSum.from_power_poly(poly, label=f"legendre:{m}")


# ── Right-hand sides ─────────────────────────────────────────────────────────

@dataclass(frozen=True)
class RhsSpec:
    """
    Right-hand side of a fractional initial-value problem.

    rhs(s) returns f for order s; exact_solution(s), when present, returns u
    with D^s u (+ u for reaction problems) = f and u(anchor) = 0.
    """
    name: str
    description: str
    rhs: Callable[[float], Callable]
    exact_solution: Optional[Callable[[float], Callable]] = None
    reaction: bool = False
    default_deriv_n: int = 12


def _ex41(s):
    return lambda x: 1.0 + np.asarray(x) + np.cos(x) + np.sin(x)


def _ex42(s):
    return lambda x: np.exp(np.sin(x) + 2.0)


def _ex43(s):
    return lambda x: np.power(1.0 + np.asarray(x, dtype=float), 7.89)


def _remark45_rhs(s):
    # u = (1-x)^{12+s}: D^s u = Γ(13+s)/Γ(13) (1-x)^12
    scale = gamma_ratio(13.0 + s, 13.0)
    return lambda x: scale * np.power(1.0 - np.asarray(x, dtype=float), 12.0) \
        + np.power(1.0 - np.asarray(x, dtype=float), 12.0 + s)


def _remark45_solution(s):
    return lambda x: np.power(1.0 - np.asarray(x, dtype=float), 12.0 + s)


def _legendre_rhs(m: int) -> Callable[[float], Callable]:
    return lambda s: (lambda x: jacobi_eval(JacobiParam(0.0, 0.0), m, x))


def _legendre_solution(m: int) -> Callable[[float], Callable]:
    # D^s [(1-x)^s P_m^{(s,-s)}] = Γ(m+s+1)/m! L_m
    def solution(s):
        scale = 1.0 / gamma_ratio(m + s + 1.0, m + 1.0)
        return lambda x: scale * np.power(1.0 - np.asarray(x, dtype=float), s) \
            * jacobi_eval(JacobiParam(s, -s), m, x)
    return solution


RHS_REGISTRY: Dict[str, RhsSpec] = {
    'ex41': RhsSpec('ex41', 'f = 1 + x + cos x + sin x', _ex41, default_deriv_n=12),
    'ex42': RhsSpec('ex42', 'f = exp(sin x + 2)', _ex42, default_deriv_n=18),
    'ex43': RhsSpec('ex43', 'f = (1+x)^7.89', _ex43, default_deriv_n=10),
    'remark45': RhsSpec('remark45', 'reaction problem with u = (1-x)^(12+s)', _remark45_rhs,
                        exact_solution=_remark45_solution, reaction=True, default_deriv_n=12),
}

INTERP_REGISTRY: Dict[str, PowerSum] = {
    'ex31': PowerSum((PowerTerm(0.01, Side.LEFT, 10.15),), label='(1+x)^10.15/100'),
}


def _strip_builtin(function_id: str) -> str:
    return function_id[len('builtin:'):] if function_id.startswith('builtin:') else function_id


def _parse_legendre_degree(function_id: str) -> int:
    try:
        m = int(function_id.split(':', 1)[1])
    except (IndexError, ValueError):
        raise ConfigError(f"Bad Legendre id '{function_id}', expected legendre:<m>")
    if m < 0:
        raise ConfigError(f"Legendre degree must be >= 0, got {m}")
    return m


def resolve_interp_function(function_id: str) -> PowerSum:
    """Interpolation target with an exact fractional derivative."""
    name = _strip_builtin(function_id.strip())
    if name in INTERP_REGISTRY:
        return INTERP_REGISTRY[name]
    if name.startswith('legendre:'):
        return legendre_function(_parse_legendre_degree(name))
    if function_id.startswith('builtin:'):
        raise ConfigError(f"Unknown builtin function '{name}' (known: {', '.join(INTERP_REGISTRY)})")
    return parse_power_sum(name)


def resolve_rhs(function_id: str) -> RhsSpec:
    """Right-hand side for the Petrov-Galerkin solvers."""
    name = _strip_builtin(function_id.strip())
    if name in RHS_REGISTRY:
        return RHS_REGISTRY[name]
    if name.startswith('legendre:'):
        m = _parse_legendre_degree(name)
        return RhsSpec(name, f"f = L_{m}", _legendre_rhs(m), exact_solution=_legendre_solution(m),
                       default_deriv_n=max(m, 1))
    if function_id.startswith('builtin:'):
        raise ConfigError(f"Unknown builtin rhs '{name}' (known: {', '.join(RHS_REGISTRY)})")
    power_sum = parse_power_sum(name)
    return RhsSpec(name, f"f = {name}", lambda s: power_sum.value)
