"""
Quantum bouncer (continuum) reference and the polymer -> Schrodinger limit.

psi_n(z) = N_n Ai(a_n + z / l0) for z >= 0 with N_n = 1 / (sqrt(l0) |Ai'(a_n)|),
E_n = -m g l0 a_n. Matrix elements of z and z^2 have closed forms for
k != n; diagonal elements and every closed form can be checked by
quadrature.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np
from scipy.integrate import quad

from core.errors import DomainError
from bouncer.lattice import DimensionlessParams, PolymerState, lattice_state
from bouncer.specfun import airy_ai, airy_ai_prime, airy_zero

__all__ = [
    "PEV",
    "PhysicalContext",
    "NEUTRON",
    "EnergyValue",
    "ContinuumState",
    "continuum_state",
    "qb_energy",
    "qb_wavefunction",
    "qb_matrix_z",
    "qb_matrix_z2",
    "qb_matrix_quadrature",
    "transition_region_bessel",
    "continuum_limit_residual",
]

logger = logging.getLogger(__name__)

PEV = 1.602176634e-31  # J per peV
_TAIL_WIDTH = 15.0

_vector_ai = np.vectorize(airy_ai, otypes=[float])


@dataclass(frozen=True)
class PhysicalContext:
    """Particle and field constants (SI) with the derived gravitational length l0."""

    mass: float
    gravity: float
    hbar: float
    planck_mass: float
    speed_of_light: float = 2.99792458e8
    l0: float = field(init=False)

    def __post_init__(self):
        for name in ("mass", "gravity", "hbar", "planck_mass", "speed_of_light"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise DomainError(f"PhysicalContext.{name} must be positive and finite, got {value!r}")
        object.__setattr__(self, "l0", (self.hbar ** 2 / (2.0 * self.mass ** 2 * self.gravity)) ** (1.0 / 3.0))

    @classmethod
    def from_config(cls, physics) -> "PhysicalContext":
        """Build from the PHYSICS section of a run configuration."""
        return cls(mass=float(physics.MASS), gravity=float(physics.GRAVITY), hbar=float(physics.HBAR),
                   planck_mass=float(physics.PLANCK_MASS), speed_of_light=float(physics.SPEED_OF_LIGHT))

    def with_gravity_factor(self, factor: float) -> "PhysicalContext":
        """Same particle under g -> factor * g (centrifugal scenario)."""
        if factor <= 0:
            raise DomainError(f"gravity factor must be positive, got {factor!r}")
        return replace(self, gravity=self.gravity * factor)

    @property
    def energy_scale(self) -> float:
        """m g l0, the natural energy unit of the bouncer (J)."""
        return self.mass * self.gravity * self.l0

    def lattice_spacing(self, params: DimensionlessParams) -> float:
        return self.l0 / params.s

    def energy_unit(self, params: DimensionlessParams) -> float:
        """hbar^2 / (m lambda^2): converts dimensionless lattice energies to J."""
        lam = self.lattice_spacing(params)
        return self.hbar ** 2 / (self.mass * lam ** 2)

    @staticmethod
    def to_pev(joule: float) -> float:
        return joule / PEV

    @staticmethod
    def from_pev(pev: float) -> float:
        return pev * PEV


NEUTRON = PhysicalContext(mass=1.674927e-27, gravity=9.806, hbar=1.054571817e-34, planck_mass=2.176434e-8)


class EnergyValue(NamedTuple):
    joule: float
    pev: float

    @classmethod
    def from_joule(cls, joule: float) -> "EnergyValue":
        return cls(joule, joule / PEV)


@dataclass(frozen=True)
class ContinuumState:
    """Airy eigenstate n of the quantum bouncer."""

    level: int
    airy_zero: float
    norm: float
    context: PhysicalContext

    def wavefunction(self, z):
        """psi_n(z) in m^-1/2; zero below the mirror."""
        z_arr = np.asarray(z, dtype=float)
        x = self.airy_zero + z_arr / self.context.l0
        values = np.where(z_arr >= 0.0, self.norm * _vector_ai(np.where(z_arr >= 0.0, x, self.airy_zero)), 0.0)
        if values.ndim == 0:
            return float(values)
        return values

    def peak_amplitude(self, samples: int = 4000) -> float:
        x = np.linspace(0.0, abs(self.airy_zero) + 4.0, samples)
        return float(self.norm * np.max(np.abs(_vector_ai(self.airy_zero + x))))

    def normalization_check(self) -> float:
        """Integral of |psi_n|^2 over z >= 0 by adaptive quadrature."""
        a = self.airy_zero
        value, _ = quad(lambda x: airy_ai(a + x) ** 2, 0.0, abs(a) + _TAIL_WIDTH,
                        epsabs=1e-12, epsrel=1e-12, limit=400)
        return value * self.norm ** 2 * self.context.l0


def _check_level(n: int) -> int:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"level index must be a positive integer, got {n!r}")
    return int(n)


def continuum_state(n: int, ctx: PhysicalContext = NEUTRON) -> ContinuumState:
    n = _check_level(n)
    a_n = airy_zero(n)
    norm = 1.0 / (math.sqrt(ctx.l0) * abs(airy_ai_prime(a_n)))
    return ContinuumState(level=n, airy_zero=a_n, norm=norm, context=ctx)


def qb_energy(n: int, ctx: PhysicalContext = NEUTRON) -> EnergyValue:
    """E_n = -m g l0 a_n."""
    n = _check_level(n)
    return EnergyValue.from_joule(-ctx.energy_scale * airy_zero(n))


def qb_wavefunction(n: int, ctx: PhysicalContext, z):
    return continuum_state(n, ctx).wavefunction(z)


@lru_cache(maxsize=None)
def _moment(k: int, n: int, power: int) -> float:
    """int_0^inf x^p Ai(a_k + x) Ai(a_n + x) dx / (|Ai'(a_k)| |Ai'(a_n)|), signs N_n > 0."""
    a_k, a_n = airy_zero(k), airy_zero(n)
    cut = max(abs(a_k), abs(a_n)) + _TAIL_WIDTH
    value, err = quad(lambda x: x ** power * airy_ai(a_k + x) * airy_ai(a_n + x), 0.0, cut,
                      epsabs=1e-12, epsrel=1e-12, limit=400)
    logger.debug("moment k=%d n=%d p=%d value=%.12g err=%.2e", k, n, power, value, err)
    return value / (abs(airy_ai_prime(a_k)) * abs(airy_ai_prime(a_n)))


def qb_matrix_quadrature(k: int, n: int, ctx: PhysicalContext, power: int) -> float:
    """<k| z^power |n> by direct quadrature of Airy products (m^power)."""
    if power < 0:
        raise DomainError(f"power must be >= 0, got {power!r}")
    return _moment(_check_level(k), _check_level(n), int(power)) * ctx.l0 ** power


def qb_matrix_z(k: int, n: int, ctx: PhysicalContext = NEUTRON) -> float:
    """<k|z|n>; 2 (-1)^(n-k+1) l0 / (a_k - a_n)^2 off the diagonal (N_n > 0 convention)."""
    k, n = _check_level(k), _check_level(n)
    if k == n:
        return qb_matrix_quadrature(k, n, ctx, 1)
    d = airy_zero(k) - airy_zero(n)
    return 2.0 * (-1.0) ** (n - k + 1) * ctx.l0 / d ** 2


def qb_matrix_z2(k: int, n: int, ctx: PhysicalContext = NEUTRON) -> float:
    """<k|z^2|n>; 24 (-1)^(k-n-1) l0^2 / (a_k - a_n)^4 off the diagonal."""
    k, n = _check_level(k), _check_level(n)
    if k == n:
        return qb_matrix_quadrature(k, n, ctx, 2)
    d = airy_zero(k) - airy_zero(n)
    return 24.0 * (-1.0) ** (k - n - 1) * ctx.l0 ** 2 / d ** 4


def transition_region_bessel(n_order: float, x: float) -> float:
    """J_nu(x) ~ (2/x)^(1/3) Ai((2/x)^(1/3) (nu - x)) near the turning point nu ~ x.

    Only meaningful for x >> 1 and |nu - x| of order x^(1/3).
    """
    if x <= 0:
        raise DomainError(f"x must be positive, got {x!r}")
    scale = (2.0 / x) ** (1.0 / 3.0)
    return scale * airy_ai(scale * (n_order - x))


def continuum_limit_residual(params: DimensionlessParams, n: int, ctx: PhysicalContext = NEUTRON,
                             state: Optional[PolymerState] = None) -> float:
    """sup_mu |psi_mu / sqrt(lambda) - psi_n(lambda mu)| / max |psi_n|.

    The lattice state comes from the lattice route unless ``state`` is given.
    Continuum signs are aligned with the lattice convention psi_1 > 0.
    """
    if state is None:
        state = lattice_state(params, n)
    cont = continuum_state(n, ctx)
    lam = ctx.lattice_spacing(params)
    z = lam * state.mu
    sign = math.copysign(1.0, airy_ai_prime(cont.airy_zero))
    diff = np.abs(state.samples / math.sqrt(lam) - sign * cont.wavefunction(z))
    return float(np.max(diff) / cont.peak_amplitude())
