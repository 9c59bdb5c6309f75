"""
Quadrupole (graviton emission) rates and their polymer corrections.

Gamma_kn = (4/15) omega^5 Q_kn^2 / (M_pl^2 c^4) with Q_kn = m <k|z^2|n>.
Polymer corrections enter through the transition frequency and through
first-order mixing of the Airy states; all sums use the closed-form z^2
elements except on the diagonal, where quadrature is used.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, NamedTuple, Sequence

import numpy as np

from core.errors import DegeneratePairError, DomainError
from bouncer.continuum import NEUTRON, PhysicalContext, qb_matrix_quadrature, qb_matrix_z2
from bouncer.lattice import DimensionlessParams
from bouncer.spectrum import continuum_energy, perturbative_shift
from bouncer.specfun import airy_zero
from bouncer.transitions import transition_frequency

__all__ = [
    "QuadrupoleRatio",
    "QuadrupoleReport",
    "quad_rate_qm",
    "polymer_frequency",
    "f_coupling",
    "polymer_quadrupole",
    "polymer_rate_ratio",
    "fit_leading_coefficient",
    "quadrupole_report",
]

logger = logging.getLogger(__name__)

MIN_TRUNCATION = 10


def _distinct(k: int, n: int):
    if k == n:
        raise DegeneratePairError(f"quadrupole transition needs distinct levels, got k = n = {k}")


def quad_rate_qm(k: int, n: int, ctx: PhysicalContext = NEUTRON) -> float:
    """Spontaneous graviton emission rate k -> n in 1/s (no polymer correction)."""
    _distinct(k, n)
    omega = abs(transition_frequency(k, n, ctx))
    q = ctx.mass * qb_matrix_z2(k, n, ctx)
    return 4.0 / 15.0 * omega ** 5 * q ** 2 / (ctx.planck_mass ** 2 * ctx.speed_of_light ** 4)


def polymer_frequency(k: int, n: int, params: DimensionlessParams, as_printed: bool = True) -> float:
    """omega^lambda_kn / omega_kn.

    ``as_printed`` gives 1 - (a_k + a_n) / (60 s^2), which exceeds 1.
    Otherwise the ratio is rebuilt from the perturbatively shifted levels,
    which equals 1 + (a_k + a_n) / (60 s^2).
    """
    _distinct(k, n)
    if as_printed:
        return 1.0 - (airy_zero(k) + airy_zero(n)) / (60.0 * params.s ** 2)
    shifted = (continuum_energy(params, k) + perturbative_shift(params, k)
               - continuum_energy(params, n) - perturbative_shift(params, n))
    return shifted / (continuum_energy(params, k) - continuum_energy(params, n))


def f_coupling(l: int, n: int) -> float:
    """F_ln = [a_n - 6 / (a_l - a_n)^2] / [3 (a_l - a_n)^3]."""
    if l == n:
        raise DomainError(f"f_coupling needs l != n, got l = n = {l}")
    a_n = airy_zero(n)
    d = airy_zero(l) - a_n
    return (a_n - 6.0 / d ** 2) / (3.0 * d ** 3)


def _q(k: int, n: int) -> float:
    """<k|z^2|n> in units of l0^2."""
    if k == n:
        return qb_matrix_quadrature(k, n, NEUTRON, 2) / NEUTRON.l0 ** 2
    return qb_matrix_z2(k, n, NEUTRON) / NEUTRON.l0 ** 2


def _mixing(l: int, n: int, params: DimensionlessParams, power: int) -> float:
    # first-order admixture of state l into state n
    return -(params.s ** -power) * (-1.0) ** (l - n) * f_coupling(l, n)


class QuadrupoleRatio(NamedTuple):
    ratio: float             # Q^lambda_kn / Q_kn
    correction: float        # ratio - 1
    last_term_share: float   # |l = L contribution| / |correction|
    truncation: int


def polymer_quadrupole(k: int, n: int, params: DimensionlessParams, L: int = 30, power: int = 3) -> QuadrupoleRatio:
    """Q^lambda_kn / Q_kn with the mixing sums truncated at l <= L.

    Q^lambda_kn = Q_kn + sum_{l != k} c^(k)_l Q_ln + sum_{l != n} c^(n)_l Q_kl,
    c^(n)_l = -(lambda / l0)^power (-1)^(l-n) F_ln.
    """
    _distinct(k, n)
    if L < MIN_TRUNCATION:
        raise DomainError(f"truncation L must be >= {MIN_TRUNCATION}, got {L!r}")
    if L < max(k, n):
        raise DomainError(f"truncation L={L} must cover levels {k} and {n}")
    if power not in (2, 3):
        raise DomainError(f"power must be 2 or 3, got {power!r}")

    q_kn = _q(k, n)
    contributions = np.zeros(L)
    for l in range(1, L + 1):
        term = 0.0
        if l != k:
            term += _mixing(l, k, params, power) * _q(l, n)
        if l != n:
            term += _mixing(l, n, params, power) * _q(k, l)
        contributions[l - 1] = term

    correction = float(np.sum(contributions)) / q_kn
    share = abs(contributions[-1] / q_kn) / abs(correction) if correction else 0.0
    logger.debug("Q ratio k=%d n=%d s=%g L=%d p=%d correction=%.6e share=%.1e",
                 k, n, params.s, L, power, correction, share)
    return QuadrupoleRatio(1.0 + correction, correction, share, int(L))


def polymer_rate_ratio(k: int, n: int, params: DimensionlessParams, L: int = 30, power: int = 3,
                       as_printed: bool = True) -> float:
    """Gamma^lambda / Gamma = (omega^lambda / omega)^5 (Q^lambda / Q)^2."""
    frequency = polymer_frequency(k, n, params, as_printed=as_printed)
    quadrupole = polymer_quadrupole(k, n, params, L, power).ratio
    return frequency ** 5 * quadrupole ** 2


def fit_leading_coefficient(k: int, n: int, s_values: Sequence[float], L: int = 30, power: int = 3) -> float:
    """Coefficient of (lambda / l0)^2 in ratio - 1, fitted on s^-2, s^-3, s^-4."""
    s = np.asarray(s_values, dtype=float)
    if s.size < 2:
        raise DomainError("fit_leading_coefficient needs at least two s values")
    y = np.array([polymer_rate_ratio(k, n, DimensionlessParams(v), L, power) - 1.0 for v in s])
    # two points only fit s^-2 and s^-3
    basis = np.column_stack([s ** -p for p in (2, 3, 4)[: min(3, s.size)]])
    coefficients, *_ = np.linalg.lstsq(basis, y, rcond=None)
    return float(coefficients[0])


@dataclass
class QuadrupoleReport:
    from_level: int
    to_level: int
    rate_qm: float
    truncation: int
    power: int
    ratios: Dict[float, float] = field(default_factory=dict)
    coefficient: float = float("nan")
    coefficients_by_power: Dict[int, float] = field(default_factory=dict)

    def rows(self):
        out = []
        for s, ratio in sorted(self.ratios.items()):
            out.append({"from": self.from_level, "to": self.to_level, "s": s, "rate_qm": self.rate_qm,
                        "ratio": ratio, "truncation": self.truncation, "power": self.power})
        return out


def quadrupole_report(k: int, n: int, ctx: PhysicalContext = NEUTRON, s_values: Sequence[float] = (10, 14, 20),
                      L: int = 30, power: int = 3) -> QuadrupoleReport:
    """Rate, ratio over the s sweep and the fitted coefficient for both quadrupole powers."""
    report = QuadrupoleReport(k, n, quad_rate_qm(k, n, ctx), int(L), int(power))
    for s in s_values:
        report.ratios[float(s)] = polymer_rate_ratio(k, n, DimensionlessParams(s), L, power)
    for p in (2, 3):
        report.coefficients_by_power[p] = fit_leading_coefficient(k, n, s_values, L, p)
    report.coefficient = report.coefficients_by_power[power]
    return report
