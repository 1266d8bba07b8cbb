"""
Gamma-function machinery behind every fractional-derivative coefficient.

ln Γ uses the 13-term Lanczos sum (g = 6.0246800407767296) in its
exp(g)-scaled rational form. Ratios Γ(a)/Γ(b) are formed in log space; negative
non-integer arguments are shifted up with Γ(x) = Γ(x+1)/x before the log.
"""
import logging
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from superfrac.config import EXTENDED_DPS
from superfrac.exceptions import DomainError, PoleError

logger = logging.getLogger('services.specialfn')


# ── Extended-precision context ───────────────────────────────────────────────
# Private mpmath context for the shifted-power route; kept separate from the
# global mpmath.mp so callers' precision settings never leak in.
ext = mpmath.MPContext()
ext.dps = EXTENDED_DPS


# ── Lanczos approximation ────────────────────────────────────────────────────

_LANCZOS_G = 6.024680040776729583740234375

# Highest power first (numpy.polyval order)
_LANCZOS_NUM = np.array([
    0.006061842346248906525783753964555936883222,
    0.5098416655656676188125178644804694509993,
    19.51992788247617482847860966235652136208,
    449.9445569063168119446858607650988409623,
    6955.999602515376140356310115515198987526,
    75999.29304014542649875303443598909137092,
    601859.6171681098786670226533699352302507,
    3481712.15498064590882071018964774556468,
    14605578.08768506808414169982791359218571,
    43338889.32467613834773723740590533316085,
    86363131.28813859145546927288977868422342,
    103794043.1163445451906271053616070238554,
    56906521.91347156388090791033559122686859,
])

# x (x+1) ... (x+11), highest power first
_LANCZOS_DENOM = np.array([
    1.0, 66.0, 1925.0, 32670.0, 357423.0, 2637558.0, 13339535.0,
    45995730.0, 105258076.0, 150917976.0, 120543840.0, 39916800.0, 0.0,
])


def _lanczos_sum_expg_scaled(x: float) -> float:
    return float(np.polyval(_LANCZOS_NUM, x) / np.polyval(_LANCZOS_DENOM, x))


def ln_gamma(x: float) -> float:
    """ln Γ(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"ln_gamma requires x > 0, got {x!r}")
    zgh = x + _LANCZOS_G - 0.5
    return math.log(_lanczos_sum_expg_scaled(x)) + (x - 0.5) * (math.log(zgh) - 1.0)


def _is_pole(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def _shift_to_positive(x: float):
    """
    Apply Γ(x) = Γ(x+1)/x until the argument is positive.

    Returns (shifted_arg, log|divisor|, sign) with
    Γ(x) = sign * exp(ln Γ(shifted_arg) - log|divisor|).
    """
    log_div = 0.0
    sign = 1.0
    while x <= 0:
        log_div += math.log(abs(x))
        if x < 0:
            sign = -sign
        x += 1.0
    return x, log_div, sign


def gamma_ratio(a: float, b: float) -> float:
    """Γ(a)/Γ(b); neither argument may be a nonpositive integer."""
    for arg in (a, b):
        if _is_pole(arg):
            raise PoleError(arg)
    if a == b:
        return 1.0
    a_pos, a_div, a_sign = _shift_to_positive(a)
    b_pos, b_div, b_sign = _shift_to_positive(b)
    log_value = (ln_gamma(a_pos) - a_div) - (ln_gamma(b_pos) - b_div)
    return a_sign * b_sign * math.exp(log_value)


def gamma(x: float) -> float:
    """Γ(x) for x not a nonpositive integer."""
    return gamma_ratio(x, 1.0)


def rgamma(x: float) -> float:
    """1/Γ(x), extended by zero at the poles."""
    if _is_pole(x):
        return 0.0
    return gamma_ratio(1.0, x)


def jacobi_mass(alpha: float, beta: float) -> float:
    """∫ (1-x)^α (1+x)^β dx over [-1, 1] = 2^{α+β+1} B(α+1, β+1)."""
    if alpha <= -1 or beta <= -1:
        raise DomainError(f"Jacobi weight not integrable for alpha={alpha}, beta={beta}")
    log_mass = ((alpha + beta + 1.0) * math.log(2.0)
                + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
                - ln_gamma(alpha + beta + 2.0))
    return math.exp(log_mass)


@dataclass(frozen=True)
class GammaRatio:
    """Γ(numerator_arg)/Γ(denominator_arg), with the value kept alongside."""
    numerator_arg: float
    denominator_arg: float
    value: float

    @classmethod
    def of(cls, a: float, b: float) -> 'GammaRatio':
        return cls(numerator_arg=a, denominator_arg=b, value=gamma_ratio(a, b))
