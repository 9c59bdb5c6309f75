"""
Special functions used by the bouncer solvers.

Airy Ai/Ai' and the Airy zeros, Bessel J of real order (ascending series
plus Miller backward recurrence), the order derivative of J and log-Gamma.
Everything here is pure and reentrant; the only cache is the memoised
Airy zero table, which holds immutable floats.

Bessel sequences for large arguments span hundreds of orders of
magnitude, so the backward recurrence keeps a running power-of-two scale
next to each stored value (see :class:`ScaledFloat`) and normalises in log
space.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple, Union

import numpy as np
from scipy.optimize import brentq

from core.errors import DomainError, UnsupportedScaleError

__all__ = [
    "ScaledFloat",
    "BesselSequence",
    "airy_ai",
    "airy_ai_prime",
    "airy_zero",
    "airy_zero_approx",
    "bessel_j",
    "bessel_j_sequence",
    "bessel_j_dnu",
    "log_gamma",
    "MAX_BESSEL_ARGUMENT",
    "BRENTQ_RTOL",
]

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

MAX_BESSEL_ARGUMENT = 1.0e4
# smallest rtol brentq accepts
BRENTQ_RTOL = 4.0 * np.finfo(float).eps

_AI_0 = 0.355028053887817239260      # 3^(-2/3) / Gamma(2/3)
_AIP_0 = -0.258819403792806798405    # -3^(-1/3) / Gamma(1/3)

_SERIES_LIMIT = 2.0
_ASYMPTOTIC_LIMIT = 9.0
_CONTINUATION_STEP = 1.0

_RESCALE_EXPONENT = 512
_RESCALE_LIMIT = 2.0 ** _RESCALE_EXPONENT
_RESCALE_FACTOR = 2.0 ** -_RESCALE_EXPONENT
_LN2 = math.log(2.0)

# Lanczos approximation, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


# ---------------------------------------------------------------------------
# Scaled arithmetic
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScaledFloat:
    """A real number stored as ``mantissa * 2**exponent`` with 1 <= |mantissa| < 2."""

    mantissa: float
    exponent: int

    def __post_init__(self):
        m = abs(self.mantissa)
        if m != 0.0 and not (1.0 <= m < 2.0):
            raise DomainError(f"ScaledFloat mantissa must lie in [1, 2), got {self.mantissa!r}")

    @classmethod
    def from_float(cls, value: float, scale: int = 0) -> "ScaledFloat":
        """Normalise ``value * 2**scale``."""
        if not math.isfinite(value):
            raise DomainError(f"cannot scale non-finite value {value!r}")
        if value == 0.0:
            return cls(0.0, 0)
        m, e = math.frexp(value)
        return cls(2.0 * m, e - 1 + int(scale))

    @classmethod
    def from_log(cls, sign: float, log_abs: float) -> "ScaledFloat":
        """Build from a sign and a natural log of the magnitude."""
        if sign == 0 or log_abs == -math.inf:
            return cls(0.0, 0)
        e2 = log_abs / _LN2
        exponent = math.floor(e2)
        mantissa = 2.0 ** (e2 - exponent)
        if mantissa >= 2.0:  # rounding at the upper edge
            mantissa, exponent = 1.0, exponent + 1
        return cls(math.copysign(mantissa, sign), int(exponent))

    def to_float(self) -> float:
        return math.ldexp(self.mantissa, self.exponent)

    def log_abs(self) -> float:
        if self.mantissa == 0.0:
            return -math.inf
        return math.log(abs(self.mantissa)) + self.exponent * _LN2

    @property
    def sign(self) -> float:
        if self.mantissa == 0.0:
            return 0.0
        return math.copysign(1.0, self.mantissa)

    def __mul__(self, other: "ScaledFloat") -> "ScaledFloat":
        if not isinstance(other, ScaledFloat):
            other = ScaledFloat.from_float(float(other))
        return ScaledFloat.from_float(self.mantissa * other.mantissa, self.exponent + other.exponent)

    def __truediv__(self, other: "ScaledFloat") -> "ScaledFloat":
        if not isinstance(other, ScaledFloat):
            other = ScaledFloat.from_float(float(other))
        if other.mantissa == 0.0:
            raise ZeroDivisionError("division by a zero ScaledFloat")
        return ScaledFloat.from_float(self.mantissa / other.mantissa, self.exponent - other.exponent)

    def __neg__(self) -> "ScaledFloat":
        return ScaledFloat(-self.mantissa, self.exponent)


@dataclass(frozen=True)
class BesselSequence:
    """Samples ``J_{alpha+mu}(x)`` for ``mu = 0..mu_max``."""

    base_order: float
    argument: float
    values: np.ndarray

    @property
    def mu_max(self) -> int:
        return len(self.values) - 1

    def order(self, mu: int) -> float:
        return self.base_order + mu

    def recurrence_residual(self) -> float:
        """Max |J_{v+1} + J_{v-1} - (2v/x) J_v| over interior samples, relative to max |J|."""
        v = self.values
        if len(v) < 3:
            return 0.0
        mu = np.arange(1, len(v) - 1)
        nu = self.base_order + mu
        resid = np.abs(v[2:] + v[:-2] - (2.0 * nu / self.argument) * v[1:-1])
        mask = np.abs(v[1:-1]) > 1e-280
        peak = np.max(np.abs(v))
        if not np.any(mask) or peak == 0.0:
            return 0.0
        return float(np.max(resid[mask]) / peak)


# ---------------------------------------------------------------------------
# log-Gamma
# ---------------------------------------------------------------------------

def log_gamma(x: ArrayLike) -> ArrayLike:
    """ln Gamma(x) for x > 0 (scalar or array) by the Lanczos approximation."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise DomainError(f"log_gamma requires finite x > 0, got {x!r}")

    small = arr < 0.5
    z = np.where(small, arr + 1.0, arr) - 1.0
    series = np.full_like(z, _LANCZOS_COEF[0])
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        series = series + c / (z + i)
    t = z + _LANCZOS_G + 0.5
    out = _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(series)
    out = np.where(small, out - np.log(arr), out)
    if out.ndim == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# Airy functions
# ---------------------------------------------------------------------------

def _airy_u_coefficients(count: int = 40) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
    u = [1.0]
    for k in range(1, count):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k))
    v = [1.0] + [-(6 * k + 1) / (6 * k - 1) * u[k] for k in range(1, count)]
    return tuple(u), tuple(v)


_AIRY_U, _AIRY_V = _airy_u_coefficients()


def _asymptotic_sum(coef, zeta: float, start: int, step: int) -> float:
    """Sum (-1)^j coef[start + step*j] zeta^-(start + step*j), stopping at the smallest term."""
    total = 0.0
    previous = math.inf
    sign = 1.0
    for k in range(start, len(coef), step):
        term = coef[k] * zeta ** (-k)
        if abs(term) > previous:
            break
        total += sign * term
        if abs(term) < 1e-17 * max(abs(total), 1e-300):
            break
        previous = abs(term)
        sign = -sign
    return total


def _airy_asymptotic_positive(x: float) -> Tuple[float, float]:
    zeta = 2.0 / 3.0 * x ** 1.5
    decay = math.exp(-zeta) / (2.0 * math.sqrt(math.pi))
    ai = decay / x ** 0.25 * _asymptotic_sum(_AIRY_U, zeta, 0, 1)
    aip = -decay * x ** 0.25 * _asymptotic_sum(_AIRY_V, zeta, 0, 1)
    return ai, aip


def _airy_asymptotic_negative(z: float) -> Tuple[float, float]:
    """Ai(-z) and Ai'(-z) for large z > 0."""
    zeta = 2.0 / 3.0 * z ** 1.5
    theta = zeta - math.pi / 4.0
    c, s = math.cos(theta), math.sin(theta)
    p = _asymptotic_sum(_AIRY_U, zeta, 0, 2)
    q = _asymptotic_sum(_AIRY_U, zeta, 1, 2)
    r = _asymptotic_sum(_AIRY_V, zeta, 0, 2)
    t = _asymptotic_sum(_AIRY_V, zeta, 1, 2)
    root_pi = math.sqrt(math.pi)
    ai = (c * p + s * q) / (root_pi * z ** 0.25)
    aip = z ** 0.25 * (s * r - c * t) / root_pi
    return ai, aip


def _taylor_step(x0: float, y: float, dy: float, h: float) -> Tuple[float, float]:
    """Advance a solution of y'' = x y from x0 to x0 + h with its Taylor series."""
    c_prev2, c_prev1 = y, dy            # c_k, c_{k+1}
    val = y + dy * h
    der = dy
    c_km1 = 0.0                         # c_{k-1}
    hk = h                              # h^(k+1)
    small_run = 0
    for k in range(0, 400):
        c_next = (x0 * c_prev2 + c_km1) / ((k + 2) * (k + 1))
        der += (k + 2) * c_next * hk
        hk *= h
        term = c_next * hk
        val += term
        if abs(term) <= 1e-17 * max(abs(val), 1e-300) and k > 6:
            small_run += 1
            if small_run >= 3:
                break
        else:
            small_run = 0
        c_km1, c_prev2, c_prev1 = c_prev2, c_prev1, c_next
    return val, der


def _airy_pair(x: float) -> Tuple[float, float]:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"Airy functions need a finite argument, got {x!r}")
    if abs(x) <= _SERIES_LIMIT:
        return _taylor_step(0.0, _AI_0, _AIP_0, x)
    if x >= _ASYMPTOTIC_LIMIT:
        return _airy_asymptotic_positive(x)
    if x <= -_ASYMPTOTIC_LIMIT:
        return _airy_asymptotic_negative(-x)

    # Ai is the recessive solution for x > 0: integrate toward the origin.
    if x > 0:
        x0 = _ASYMPTOTIC_LIMIT
        y, dy = _airy_asymptotic_positive(x0)
    else:
        x0, y, dy = 0.0, _AI_0, _AIP_0
    steps = max(1, math.ceil(abs(x - x0) / _CONTINUATION_STEP))
    h = (x - x0) / steps
    for i in range(steps):
        y, dy = _taylor_step(x0 + i * h, y, dy, h)
    return y, dy


def airy_ai(x: float) -> float:
    """Airy function Ai(x)."""
    return _airy_pair(x)[0]


def airy_ai_prime(x: float) -> float:
    """Derivative Ai'(x)."""
    return _airy_pair(x)[1]


def _check_level(n: int) -> int:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"level index must be a positive integer, got {n!r}")
    return int(n)


def airy_zero_approx(n: int) -> float:
    """Semiclassical estimate -[3 pi/2 (n - 1/4)]^(2/3) of the n-th Airy zero."""
    n = _check_level(n)
    return -((1.5 * math.pi * (n - 0.25)) ** (2.0 / 3.0))


@lru_cache(maxsize=None)
def _airy_zero_cached(n: int) -> float:
    guess = airy_zero_approx(n)
    spacing = math.pi / math.sqrt(abs(guess))
    delta = min(0.05 * abs(guess), 0.4 * spacing)
    lo, hi = guess - delta, guess + delta
    f_lo, f_hi = airy_ai(lo), airy_ai(hi)
    tries = 0
    while f_lo * f_hi > 0.0:
        # the estimate is good to ~1%, widen a little and retry
        delta *= 1.5
        lo, hi = guess - delta, guess + delta
        f_lo, f_hi = airy_ai(lo), airy_ai(hi)
        tries += 1
        if tries > 10:
            raise DomainError(f"could not bracket Airy zero {n}")
    return brentq(airy_ai, lo, hi, xtol=1e-14, rtol=BRENTQ_RTOL, maxiter=200)


def airy_zero(n: int) -> float:
    """The n-th zero a_n < 0 of Ai."""
    return _airy_zero_cached(_check_level(n))


# ---------------------------------------------------------------------------
# Bessel J
# ---------------------------------------------------------------------------

def _bessel_j_series(nu: float, x: float) -> float:
    """Ascending series for J_nu(x); valid for nu > -1, also non-integer negative nu."""
    if x == 0.0:
        return 1.0 if nu == 0.0 else 0.0
    half = 0.5 * x
    q = half * half
    log_pref = nu * math.log(half) - log_gamma(nu + 1.0)
    term = 1.0
    total = 1.0
    k = 1
    while k < 100_000:
        term *= -q / (k * (nu + k))
        total += term
        if k * (nu + k) > q and abs(term) < 1e-17 * abs(total):
            break
        k += 1
    return math.exp(log_pref) * total


def _series_is_stable(nu: float, x: float) -> bool:
    # cancellation in the alternating series is bounded by roughly exp(2 (x/2)^2 / (nu+1))
    return x <= 4.0 or (0.5 * x) ** 2 <= 4.0 * (nu + 1.0)


def _check_bessel_args(nu: float, x: float):
    if not (math.isfinite(nu) and math.isfinite(x)):
        raise DomainError(f"Bessel arguments must be finite, got nu={nu!r}, x={x!r}")
    if nu < 0.0 or x < 0.0:
        raise DomainError(f"Bessel J needs nu >= 0 and x >= 0, got nu={nu!r}, x={x!r}")


def bessel_j(nu: float, x: float) -> float:
    """J_nu(x) for real nu >= 0 and 0 <= x <= 1e4."""
    nu, x = float(nu), float(x)
    _check_bessel_args(nu, x)
    if _series_is_stable(nu, x):
        return _bessel_j_series(nu, x)
    m = math.floor(nu)
    alpha = nu - m
    seq = bessel_j_sequence(alpha, x, max(m, 1))
    return float(seq.values[m])


def _backward_recurrence(alpha: float, x: float, start: int) -> Tuple[np.ndarray, np.ndarray]:
    """Unnormalised minimal solution for orders alpha..alpha+start as (value, log2-scale) pairs."""
    vals = [0.0] * (start + 1)
    scales = [0] * (start + 1)
    two_over_x = 2.0 / x
    j_next, j_cur, scale = 0.0, 1.0, 0
    vals[start] = 1.0
    for k in range(start, 0, -1):
        j_prev = two_over_x * (alpha + k) * j_cur - j_next
        if abs(j_prev) > _RESCALE_LIMIT:
            j_prev *= _RESCALE_FACTOR
            j_cur *= _RESCALE_FACTOR
            scale += _RESCALE_EXPONENT
        vals[k - 1] = j_prev
        scales[k - 1] = scale
        j_next, j_cur = j_cur, j_prev
    return np.array(vals), np.array(scales, dtype=np.int64)


def _watson_normalizer(alpha: float, log_v: np.ndarray, sign_v: np.ndarray) -> ScaledFloat:
    """Sum_k (alpha+2k) Gamma(alpha+k)/k! * v_{2k}, as a ScaledFloat."""
    even = np.arange(0, len(log_v), 2)
    k = even // 2
    log_c = np.empty(len(k))
    log_c[0] = log_gamma(alpha + 1.0)
    if len(k) > 1:
        kk = k[1:].astype(float)
        log_c[1:] = np.log(alpha + 2.0 * kk) + log_gamma(alpha + kk) - log_gamma(kk + 1.0)
    log_terms = log_c + log_v[even]
    signs = sign_v[even]
    live = signs != 0
    peak = np.max(log_terms[live])
    total = float(np.sum(signs[live] * np.exp(log_terms[live] - peak)))
    if total == 0.0:
        raise DomainError("Watson normalisation sum vanished")
    return ScaledFloat.from_log(math.copysign(1.0, total), peak + math.log(abs(total)))


def bessel_j_sequence(alpha: float, x: float, mu_max: int, start: Optional[int] = None) -> BesselSequence:
    """J_{alpha+mu}(x) for mu = 0..mu_max by Miller's backward recurrence.

    The recurrence starts at ``x + 15 x^(1/3) + mu_max + 40`` (or ``start``
    when given and larger) and is normalised with the Neumann/Watson sum
    ``sum_k (alpha+2k) Gamma(alpha+k)/k! J_{alpha+2k}(x) = (x/2)^alpha``.
    """
    alpha, x = float(alpha), float(x)
    if not (0.0 <= alpha < 1.0) or not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"bessel_j_sequence needs 0 <= alpha < 1 and x > 0, got alpha={alpha!r}, x={x!r}")
    if isinstance(mu_max, bool) or int(mu_max) != mu_max or mu_max < 1:
        raise DomainError(f"mu_max must be an integer >= 1, got {mu_max!r}")
    if x > MAX_BESSEL_ARGUMENT:
        raise UnsupportedScaleError(
            f"Bessel argument x={x:g} exceeds the supported range x <= {MAX_BESSEL_ARGUMENT:g}")

    mu_max = int(mu_max)
    minimal = int(math.ceil(x + 15.0 * x ** (1.0 / 3.0) + mu_max + 40))
    start = minimal if start is None else max(int(start), minimal)

    raw, scales = _backward_recurrence(alpha, x, start)
    mant, exps = np.frexp(raw)
    sign_v = np.sign(raw)
    with np.errstate(divide="ignore"):
        log_v = np.log(np.abs(mant)) + (exps + scales) * _LN2

    norm = _watson_normalizer(alpha, log_v, sign_v)
    log_j = log_v + alpha * math.log(0.5 * x) - norm.log_abs()
    values = np.where(sign_v != 0, sign_v * norm.sign * np.exp(np.where(sign_v != 0, log_j, 0.0)), 0.0)
    logger.debug("bessel_j_sequence alpha=%.6f x=%.3f start=%d", alpha, x, start)
    return BesselSequence(base_order=alpha, argument=x, values=values[: mu_max + 1])


def _order_sample(nu: float, x: float) -> float:
    if nu < 0.0:
        return _bessel_j_series(nu, x)
    return bessel_j(nu, x)


def bessel_j_dnu(nu: float, x: float) -> float:
    """dJ_nu(x)/dnu by a central difference with step 1e-6 * max(1, |nu|).

    Orders that dip below zero (nu close to 0) are sampled from the
    ascending series, which is valid for nu > -1.
    """
    nu, x = float(nu), float(x)
    if not (math.isfinite(nu) and math.isfinite(x)) or x < 0.0 or nu < 0.0:
        raise DomainError(f"bessel_j_dnu needs finite nu >= 0 and x >= 0, got nu={nu!r}, x={x!r}")
    h = 1e-6 * max(1.0, abs(nu))
    return (_order_sample(nu + h, x) - _order_sample(nu - h, x)) / (2.0 * h)
