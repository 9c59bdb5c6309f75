"""
Comparison with the neutron bouncing experiment.

Critical heights h_n = -a_n l0, the energy-shift constraint
|Delta E_n| < Delta E_exp and the resulting upper bound on lambda, for free
fall and for an enhanced effective gravity g -> g_factor * g.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Sequence, Tuple

from core.errors import DomainError
from bouncer.continuum import NEUTRON, PEV, EnergyValue, PhysicalContext
from bouncer.lattice import DimensionlessParams
from bouncer.spectrum import perturbative_shift
from bouncer.specfun import airy_zero

__all__ = [
    "EXPERIMENTAL_HEIGHTS",
    "DELTA_E_EXP_PEV",
    "HeightCheck",
    "BoundReport",
    "granit_heights",
    "height_containment",
    "granit_bound_lambda",
    "shift_energy_physical",
    "bound_table",
]

logger = logging.getLogger(__name__)

# level -> (mean, statistical, systematic) in micrometres
EXPERIMENTAL_HEIGHTS = {
    1: (12.2, 1.8, 0.7),
    2: (21.6, 2.2, 0.7),
}

# measured energy resolution per level, peV
DELTA_E_EXP_PEV = {1: 0.102, 2: 0.051}

NEUTRON_RADIUS_NOTE = ("the centrifugal bound is close to the neutron size, "
                       "so it should be read as a strict lambda << bound")


def granit_heights(ctx: PhysicalContext = NEUTRON, levels: Iterable[int] = (1, 2)) -> List[Tuple[int, float]]:
    """[(n, h_n in micrometres)] with h_n = -a_n l0."""
    return [(int(n), -airy_zero(int(n)) * ctx.l0 * 1e6) for n in levels]


class HeightCheck(NamedTuple):
    level: int
    theory_um: float
    measured_um: float
    error_um: float
    inside: bool


def height_containment(ctx: PhysicalContext = NEUTRON, combine: str = "quadrature") -> List[HeightCheck]:
    """Theoretical heights against the measured ones, errors combined in quadrature or linearly."""
    if combine not in ("quadrature", "linear"):
        raise DomainError(f"combine must be 'quadrature' or 'linear', got {combine!r}")
    checks = []
    for n, h in granit_heights(ctx, sorted(EXPERIMENTAL_HEIGHTS)):
        mean, stat, syst = EXPERIMENTAL_HEIGHTS[n]
        error = math.hypot(stat, syst) if combine == "quadrature" else stat + syst
        checks.append(HeightCheck(n, h, mean, error, abs(h - mean) <= error))
    return checks


@dataclass(frozen=True)
class BoundReport:
    level: int
    delta_E_exp: float      # J
    g_factor: float
    lambda_max: float       # m
    l0: float               # m, under g_factor * g
    note: str = ""

    @property
    def delta_E_exp_pev(self) -> float:
        return self.delta_E_exp / PEV

    @property
    def perturbative(self) -> bool:
        """The shift formula assumes lambda << l0; bounds at or above l0 are outside it."""
        return self.lambda_max < self.l0

    def as_row(self) -> dict:
        return {"level": self.level, "delta_E_exp_peV": self.delta_E_exp_pev, "g_factor": self.g_factor,
                "lambda_max": self.lambda_max, "l0": self.l0, "perturbative": self.perturbative,
                "note": self.note}


def granit_bound_lambda(n: int, delta_E_exp: float, ctx: PhysicalContext = NEUTRON,
                        g_factor: float = 1.0) -> BoundReport:
    """lambda^2 < 60 l0 Delta E_exp / (m g a_n^2) with l0 and g taken under g_factor."""
    if delta_E_exp <= 0:
        raise DomainError(f"delta_E_exp must be positive, got {delta_E_exp!r}")
    if g_factor < 1:
        raise DomainError(f"g_factor must be >= 1, got {g_factor!r}")
    scaled = ctx.with_gravity_factor(g_factor)
    a_n = airy_zero(n)
    lam = math.sqrt(60.0 * scaled.l0 * delta_E_exp / (scaled.mass * scaled.gravity * a_n ** 2))
    note = NEUTRON_RADIUS_NOTE if g_factor > 1 else ""
    report = BoundReport(int(n), float(delta_E_exp), float(g_factor), lam, scaled.l0, note)
    if not report.perturbative:
        logger.warning("bound lambda < %.3e m for n=%d exceeds l0 = %.3e m; outside the perturbative regime",
                       lam, n, scaled.l0)
    return report


def shift_energy_physical(params: DimensionlessParams, n: int, ctx: PhysicalContext = NEUTRON) -> EnergyValue:
    """Delta E_n = Delta eps_n hbar^2 / (m lambda^2); always negative."""
    return EnergyValue.from_joule(perturbative_shift(params, n) * ctx.energy_unit(params))


def bound_table(levels: Sequence[int], delta_E_pev: Sequence[float], g_factors: Sequence[float] = (1.0,),
                ctx: PhysicalContext = NEUTRON) -> List[BoundReport]:
    """Bounds for every (g_factor, level) pair, ordered by g_factor then level."""
    if len(levels) != len(delta_E_pev):
        raise DomainError("levels and delta_E_pev must have equal length")
    return [granit_bound_lambda(n, e * PEV, ctx, g) for g in g_factors for n, e in zip(levels, delta_E_pev)]
