"""
Vibration-induced transitions between polymer bouncer levels.

Matrix elements T_nm = sum_mu psi^n_mu (psi^m_{mu+1} - psi^m_{mu-1}) are
computed three ways from lattice states on one common truncation: the
direct sum, the boundary closed form and the dipole identity. Rates,
lifetimes and the vibration bound on lambda are evaluated in SI with
angular frequencies of the continuum levels.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from core.errors import DegeneratePairError, DomainError, UnboundedBoundError
from bouncer.continuum import NEUTRON, PhysicalContext, qb_energy
from bouncer.lattice import DimensionlessParams, PolymerState, lattice_states

__all__ = [
    "TransitionResult",
    "VibrationSpectrumModel",
    "MomentumElement",
    "OmegaFactor",
    "LifetimeResult",
    "VibrationLifetimeReport",
    "DEFAULT_S_A",
    "transition_frequency",
    "lattice_dipole",
    "hopping_sum",
    "matrix_T_direct",
    "matrix_T_closed",
    "matrix_T_dipole",
    "transition_result",
    "matrix_P_quantum",
    "transition_rate",
    "omega_n_factor",
    "lifetime",
    "vibration_bound_lambda",
    "vibration_lifetime_report",
]

logger = logging.getLogger(__name__)

DEFAULT_S_A = 1.0e-10  # m^2 Hz^3, averaged over all transitions
DEGENERATE_GAP = 1e-13


# ---------------------------------------------------------------------------
# Lattice matrix elements
# ---------------------------------------------------------------------------

@lru_cache(maxsize=16)
def _common_states(params: DimensionlessParams, n_max: int) -> Tuple[PolymerState, ...]:
    return tuple(lattice_states(params, n_max))


def _pair(params: DimensionlessParams, n: int, m: int) -> Tuple[PolymerState, PolymerState]:
    for level in (n, m):
        if isinstance(level, bool) or int(level) != level or level < 1:
            raise DomainError(f"level index must be a positive integer, got {level!r}")
    states = _common_states(params, int(max(n, m)))
    return states[int(n) - 1], states[int(m) - 1]


def lattice_dipole(params: DimensionlessParams, n: int, m: int) -> float:
    """sum_mu mu psi^n_mu psi^m_mu (the lattice <n|z|m> in units of lambda)."""
    a, b = _pair(params, n, m)
    return float(np.sum(a.mu * a.samples * b.samples))


def hopping_sum(params: DimensionlessParams, n: int, m: int) -> float:
    """sum_mu psi^n_mu (psi^m_{mu+1} + psi^m_{mu-1}); equals lattice_dipole / upsilon for n != m."""
    a, b = _pair(params, n, m)
    psi_n = a.samples[1:]
    padded = np.concatenate((b.samples, [0.0]))
    return float(np.dot(psi_n, padded[2:] + padded[:-2]))


def matrix_T_direct(params: DimensionlessParams, n: int, m: int) -> float:
    """Direct summation, psi_0 = psi_{N+1} = 0."""
    a, b = _pair(params, n, m)
    psi_n = a.samples[1:]
    padded = np.concatenate((b.samples, [0.0]))
    return float(np.dot(psi_n, padded[2:] - padded[:-2]))


def _gap(a: PolymerState, b: PolymerState) -> float:
    gap = a.energy - b.energy
    if abs(gap) < DEGENERATE_GAP:
        raise DegeneratePairError(f"levels {a.level} and {b.level} have |eps_n - eps_m| = {abs(gap):.3e}")
    return gap


def matrix_T_closed(params: DimensionlessParams, n: int, m: int, boundary_coefficient: float = 2.0) -> float:
    """2 (eps_n - eps_m) T_nm = c psi^n_1 psi^m_1 - upsilon^-2 sum_mu mu psi^n psi^m.

    Exact summation gives c = 2; ``boundary_coefficient=0.5`` reproduces the
    printed variant of the formula.
    """
    a, b = _pair(params, n, m)
    gap = _gap(a, b)
    dipole = float(np.sum(a.mu * a.samples * b.samples))
    boundary = boundary_coefficient * a.samples[1] * b.samples[1]
    return (boundary - dipole / params.upsilon ** 2) / (2.0 * gap)


def matrix_T_dipole(params: DimensionlessParams, n: int, m: int) -> float:
    """T_nm = -2 (eps_n - eps_m) sum_mu mu psi^n psi^m."""
    a, b = _pair(params, n, m)
    if n == m:
        return 0.0
    gap = _gap(a, b)
    return -2.0 * gap * float(np.sum(a.mu * a.samples * b.samples))


# ---------------------------------------------------------------------------
# Physical layer
# ---------------------------------------------------------------------------

def transition_frequency(n: int, m: int, ctx: PhysicalContext = NEUTRON) -> float:
    """omega_nm = (E_n - E_m) / hbar (rad/s, signed)."""
    return (qb_energy(n, ctx).joule - qb_energy(m, ctx).joule) / ctx.hbar


@dataclass(frozen=True)
class TransitionResult:
    from_level: int
    to_level: int
    T: float
    omega: float

    @property
    def P_magnitude(self) -> float:
        """|P_nm| in units of hbar / lambda."""
        return abs(self.T) / 2.0

    def momentum(self, ctx: PhysicalContext, params: DimensionlessParams) -> float:
        """|P_nm| in kg m/s."""
        return self.P_magnitude * ctx.hbar / ctx.lattice_spacing(params)


def transition_result(params: DimensionlessParams, n: int, m: int,
                      ctx: PhysicalContext = NEUTRON) -> TransitionResult:
    return TransitionResult(n, m, matrix_T_closed(params, n, m), transition_frequency(n, m, ctx))


@dataclass(frozen=True)
class VibrationSpectrumModel:
    """Acceleration power spectrum S_a(omega) in m^2 Hz^3.

    ``constant`` applies one averaged value to every transition;
    ``tabulated`` interpolates linearly in omega and holds the end values
    outside the table.
    """

    kind: str
    level: float = DEFAULT_S_A
    frequencies: Tuple[float, ...] = ()
    values: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind == "constant":
            if self.level < 0:
                raise DomainError(f"S_a must be >= 0, got {self.level!r}")
        elif self.kind == "tabulated":
            if len(self.frequencies) != len(self.values) or len(self.values) < 2:
                raise DomainError("tabulated S_a needs matching frequency/value tables of length >= 2")
            if any(v < 0 for v in self.values):
                raise DomainError("tabulated S_a contains negative values")
            if any(b <= a for a, b in zip(self.frequencies, self.frequencies[1:])):
                raise DomainError("tabulated S_a frequencies must be strictly increasing")
        else:
            raise DomainError(f"unknown spectrum kind {self.kind!r}")

    @classmethod
    def constant(cls, level: float = DEFAULT_S_A) -> "VibrationSpectrumModel":
        return cls("constant", level=float(level))

    @classmethod
    def tabulated(cls, frequencies: Sequence[float], values: Sequence[float]) -> "VibrationSpectrumModel":
        return cls("tabulated", frequencies=tuple(map(float, frequencies)), values=tuple(map(float, values)))

    def __call__(self, omega: float) -> float:
        if self.kind == "constant":
            return self.level
        return float(np.interp(abs(omega), self.frequencies, self.values))


class MomentumElement(NamedTuple):
    magnitude: float     # kg m/s
    correction: float    # dimensionless polymer factor in the bracket


def matrix_P_quantum(n: int, m: int, params: Optional[DimensionlessParams],
                     ctx: PhysicalContext = NEUTRON) -> MomentumElement:
    """|P_nm| ~ (m g / omega) [1 + (-1)^(n-m) g / (2 l0 omega^2) (lambda / l0)^3].

    ``params=None`` is the continuum limit lambda -> 0.
    """
    if n == m:
        raise DegeneratePairError(f"momentum element needs distinct levels, got n = m = {n}")
    omega = abs(transition_frequency(n, m, ctx))
    ratio3 = 0.0 if params is None else params.s ** -3
    correction = (-1.0) ** (n - m) * ctx.gravity / (2.0 * ctx.l0 * omega ** 2) * ratio3
    return MomentumElement(ctx.mass * ctx.gravity / omega * (1.0 + correction), correction)


def transition_rate(n: int, m: int, model: VibrationSpectrumModel, params: Optional[DimensionlessParams],
                    ctx: PhysicalContext = NEUTRON) -> float:
    """Probability per unit time of n -> m under mirror vibrations (1/s)."""
    if n == m:
        raise DegeneratePairError(f"transition rate needs distinct levels, got n = m = {n}")
    omega = abs(transition_frequency(n, m, ctx))
    s_a = model(omega)
    if s_a < 0:
        raise DomainError(f"S_a must be >= 0, got {s_a!r}")
    ratio3 = 0.0 if params is None else params.s ** -3
    bracket = 1.0 + (-1.0) ** (n - m) * ctx.gravity / (ctx.l0 * omega ** 2) * ratio3
    if bracket < 0.0:
        logger.warning("polymer correction exceeds 1 for %d->%d (bracket %.3g); clamped to 0", n, m, bracket)
        bracket = 0.0
    return (ctx.mass * ctx.gravity / ctx.hbar) ** 2 * omega ** -4 * bracket * s_a


class OmegaFactor(NamedTuple):
    value: float            # 1/s
    last_term: float        # magnitude of the m = n_max term, truncation estimate
    terms: int


def omega_n_factor(n: int, model: VibrationSpectrumModel, ctx: PhysicalContext = NEUTRON,
                   n_max: int = 20) -> OmegaFactor:
    """Omega_n = (m g / hbar)^2 (g / l0) sum_{m != n} (-1)^(n-m) S_a(omega_nm) / omega_nm^6."""
    if n_max < n + 1:
        raise DomainError(f"n_max={n_max} must be at least n + 1 = {n + 1}")
    prefactor = (ctx.mass * ctx.gravity / ctx.hbar) ** 2 * ctx.gravity / ctx.l0
    terms = []
    for m in range(1, n_max + 1):
        if m == n:
            continue
        omega = transition_frequency(n, m, ctx)
        terms.append((-1.0) ** (n - m) * model(omega) / omega ** 6)
    value = prefactor * math.fsum(terms)
    last = prefactor * abs(terms[-1])
    logger.debug("Omega_%d = %.6e (n_max=%d, last term %.2e)", n, value, n_max, last)
    return OmegaFactor(value, last, len(terms))


class LifetimeResult(NamedTuple):
    tau: float       # s
    delta_t: float   # tau - t_n, s (negative for Omega_n > 0)


def lifetime(n: int, t_n: float, params: Optional[DimensionlessParams], model: VibrationSpectrumModel,
             ctx: PhysicalContext = NEUTRON, n_max: int = 20, upsilon_power: int = 1,
             omega: Optional[float] = None) -> LifetimeResult:
    """tau_n = t_n / (1 + t_n Omega_n upsilon^-p); p = 1 matches the lambda^3 bound."""
    if t_n <= 0:
        raise DomainError(f"t_n must be positive, got {t_n!r}")
    if upsilon_power not in (1, 3):
        raise DomainError(f"upsilon_power must be 1 or 3, got {upsilon_power!r}")
    if params is None:
        return LifetimeResult(float(t_n), 0.0)
    if omega is None:
        omega = omega_n_factor(n, model, ctx, n_max).value
    tau = t_n / (1.0 + t_n * omega * params.upsilon ** (-upsilon_power))
    return LifetimeResult(tau, tau - t_n)


def vibration_bound_lambda(delta_t_exp: float, t_n: float, omega_n: float,
                           ctx: PhysicalContext = NEUTRON) -> float:
    """lambda < l0 (Delta t_exp / (t_n^2 |Omega_n|))^(1/3) in m."""
    if delta_t_exp <= 0 or t_n <= 0:
        raise DomainError(f"delta_t_exp and t_n must be positive, got {delta_t_exp!r}, {t_n!r}")
    if omega_n == 0:
        raise UnboundedBoundError("Omega_n = 0: lifetime carries no polymer correction, lambda is unbounded")
    return ctx.l0 * (delta_t_exp / (t_n ** 2 * abs(omega_n))) ** (1.0 / 3.0)


@dataclass(frozen=True)
class VibrationLifetimeReport:
    level: int
    s: float
    t_n: float
    delta_t_exp: float
    omega_n: float
    omega_truncation: float
    tau: float
    delta_t: float
    lambda_max: float

    def as_row(self) -> dict:
        return {"level": self.level, "s": self.s, "t_n": self.t_n, "delta_t_exp": self.delta_t_exp,
                "omega_n": self.omega_n, "omega_truncation": self.omega_truncation,
                "tau": self.tau, "delta_t": self.delta_t, "lambda_max": self.lambda_max}


def vibration_lifetime_report(n: int, t_n: float, delta_t_exp: float, params: DimensionlessParams,
                              model: VibrationSpectrumModel, ctx: PhysicalContext = NEUTRON,
                              n_max: int = 20, upsilon_power: int = 1) -> VibrationLifetimeReport:
    """Omega_n, tau_n at ``params`` and the lambda bound for one level."""
    factor = omega_n_factor(n, model, ctx, n_max)
    life = lifetime(n, t_n, params, model, ctx, n_max, upsilon_power, omega=factor.value)
    bound = vibration_bound_lambda(delta_t_exp, t_n, factor.value, ctx)
    return VibrationLifetimeReport(n, params.s, float(t_n), float(delta_t_exp), factor.value,
                                   factor.last_term, life.tau, life.delta_t, bound)
