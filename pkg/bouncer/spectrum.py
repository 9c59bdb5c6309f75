"""
Polymer bouncer spectrum.

Levels solve the quantization condition J_{2 upsilon (1 - eps)}(2 upsilon) = 0;
the wave function is psi_mu ~ J_{mu + 2 upsilon (1 - eps)}(2 upsilon).
Brackets are seeded by the lattice eigenvalue so the n-th root is never
confused with a neighbour.
"""

import logging
import math
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq
from tqdm import tqdm

from core.errors import (BouncerError, ConvergenceError, DomainError, NegativeOrderError,
                         UnsupportedScaleError)
from bouncer.continuum import NEUTRON, PhysicalContext, continuum_state, qb_energy
from bouncer.lattice import (DEFAULT_MAX_DIMENSION, DimensionlessParams, PolymerState, build_hamiltonian,
                             eigenvalues_sturm, lattice_state)
from bouncer.specfun import BRENTQ_RTOL, MAX_BESSEL_ARGUMENT, airy_zero, bessel_j, bessel_j_dnu, bessel_j_sequence

__all__ = [
    "PolymerState",
    "SpectrumCell",
    "SpectrumTable",
    "DensityProfile",
    "GupComparison",
    "PUBLISHED_LEVELS",
    "SUSPECT_CELLS",
    "polymer_energy_bessel",
    "polymer_wavefunction",
    "polymer_state",
    "perturbative_shift",
    "continuum_energy",
    "gup_energy",
    "gup_comparison",
    "cos_expectation",
    "spectrum_table",
    "density_profile",
]

logger = logging.getLogger(__name__)

# Published ten-level table, rows s = 10..1 (rescaled energies eps_n).
PUBLISHED_LEVELS: Dict[int, Tuple[float, ...]] = {
    10: (0.011686, 0.0204258, 0.0275773, 0.033895, 0.0396679, 0.0450452, 0.0501165, 0.0549412, 0.0595607, 0.064006),
    9: (0.0144258, 0.025213, 0.0340387, 0.0418346, 0.0489574, 0.0555915, 0.0618477, 0.067799, 0.073497, 0.0789795),
    8: (0.0182553, 0.031903, 0.0430672, 0.052927, 0.0619345, 0.0703228, 0.0782324, 0.0857557, 0.0929579, 0.0998871),
    7: (0.0238393, 0.0416556, 0.056226, 0.0690913, 0.080842, 0.0917831, 0.102098, 0.111907, 0.121296, 0.130328),
    6: (0.0324385, 0.0566692, 0.0764773, 0.0939613, 0.109926, 0.124785, 0.138791, 0.152107, 0.164849, 0.177103),
    5: (0.0466892, 0.0815348, 0.110001, 0.135113, 0.15803, 0.17935, 0.199436, 0.218523, 0.23678, 0.254331),
    4: (0.0728877, 0.127199, 0.171511, 0.210558, 0.246155, 0.279241, 0.310382, 0.339949, 0.368205, 0.395345),
    3: (0.129331, 0.22536, 0.303481, 0.372143, 0.434588, 0.492495, 0.546873, 0.59839, 0.647516, 0.694599),
    2: (0.289409, 0.501951, 0.673219, 0.822395, 0.956849, 1.1875, 1.3125, 1.4375, 1.5625, 1.625),
    1: (1.1235, 1.90471, 2.50631, 3.00953, 3.44616, 3.83292, 4.18004, 4.49437, 4.78077, 5.04291),
}

# dyadic-looking entries that do not follow the neighbouring rows
SUSPECT_CELLS = frozenset((2, n) for n in range(6, 11))

TABLE_TOLERANCE = 5e-6
PERTURBATIVE_TOLERANCE = 1e-4
ROOT_TOLERANCE = 1e-12
_SEED_HALF_WIDTH = 1e-4
_MAX_HALF_WIDTH = 1e-2
_NORM_CHECK_TOLERANCE = 1e-4
BOUNDARY_TOLERANCE = 1e-10


# ---------------------------------------------------------------------------
# Energies
# ---------------------------------------------------------------------------

def _quantization_residual(eps: float, params: DimensionlessParams) -> float:
    x = params.bessel_argument
    return bessel_j(x * (1.0 - eps), x)


def polymer_energy_bessel(params: DimensionlessParams, n: int, seed: Optional[float] = None) -> float:
    """n-th root in eps of J_{2 upsilon (1 - eps)}(2 upsilon) = 0.

    The bracket starts at ``seed`` +- 1e-4 (the lattice eigenvalue when not
    given) and doubles up to +- 1e-2 before giving up.
    """
    x = params.bessel_argument
    if x > MAX_BESSEL_ARGUMENT:
        raise UnsupportedScaleError(f"s={params.s:g} gives 2*upsilon={x:g} > {MAX_BESSEL_ARGUMENT:g}")
    if seed is None:
        seed = eigenvalues_sturm(build_hamiltonian(params, n), n)[-1]
    if seed >= 1.0:
        raise NegativeOrderError(
            f"level {n} at s={params.s:g} has eps={seed:.6g} >= 1; the Bessel order 2*upsilon*(1-eps) is negative")

    half = _SEED_HALF_WIDTH
    while half <= _MAX_HALF_WIDTH * (1.0 + 1e-12):
        lo, hi = seed - half, min(seed + half, 1.0)
        f_lo, f_hi = _quantization_residual(lo, params), _quantization_residual(hi, params)
        if f_lo == 0.0:
            return lo
        if f_hi == 0.0:
            return hi
        if f_lo * f_hi < 0.0:
            root = brentq(_quantization_residual, lo, hi, args=(params,),
                          xtol=ROOT_TOLERANCE, rtol=BRENTQ_RTOL, maxiter=200)
            logger.debug("bessel root s=%g n=%d eps=%.15g (bracket +-%.0e)", params.s, n, root, half)
            return float(root)
        half *= 2.0
    raise ConvergenceError(f"no sign change of the quantization condition near eps={seed:.12g} "
                           f"(s={params.s:g}, n={n}) within +-{_MAX_HALF_WIDTH:g}")


def continuum_energy(params: DimensionlessParams, n: int) -> float:
    """-a_n / (2 s^2): the quantum bouncer level in lattice units."""
    return -airy_zero(n) / (2.0 * params.s ** 2)


def perturbative_shift(params: DimensionlessParams, n: int) -> float:
    """Leading polymer correction -a_n^2 / (120 s^4) (always negative)."""
    return -airy_zero(n) ** 2 / (120.0 * params.s ** 4)


def gup_energy(n: int, alpha_sq: float, l_min: float, ctx: PhysicalContext = NEUTRON) -> float:
    """Bouncer level with the GUP correction: -m g l0 a_n + alpha^2 l_min^2 a_n^2 (J).

    ``alpha_sq`` carries units of J/m^2 so that the correction is an energy.
    """
    if l_min < 0:
        raise DomainError(f"l_min must be >= 0, got {l_min!r}")
    a_n = airy_zero(n)
    return qb_energy(n, ctx).joule + alpha_sq * l_min ** 2 * a_n ** 2


class GupComparison(NamedTuple):
    level: int
    polymer_shift_joule: float
    gup_correction_joule: float


def gup_comparison(n: int, alpha_sq: float, l_min: float, params: DimensionlessParams,
                   ctx: PhysicalContext = NEUTRON) -> GupComparison:
    """Polymer and GUP corrections to level n side by side (they have opposite signs)."""
    polymer = perturbative_shift(params, n) * ctx.energy_unit(params)
    gup = gup_energy(n, alpha_sq, l_min, ctx) - qb_energy(n, ctx).joule
    return GupComparison(n, polymer, gup)


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------

def polymer_wavefunction(params: DimensionlessParams, n: int, energy: Optional[float] = None,
                         dimension: Optional[int] = None, check_normalization: bool = True) -> PolymerState:
    """Bessel-route state psi_mu ~ J_{mu + nu0}(2 upsilon), nu0 = 2 upsilon (1 - eps_n).

    Samples cover mu = 0..N with N the lattice truncation for level n (or
    ``dimension``). Normalisation is by direct summation; the closed form
    sum_{mu>=1} J_{mu+nu0}^2 = upsilon J_{nu0+1} dJ/dnu|_{nu0} is kept as a
    relative check in ``norm_check``.
    """
    eps = polymer_energy_bessel(params, n) if energy is None else float(energy)
    x = params.bessel_argument
    nu0 = x * (1.0 - eps)
    if nu0 < 0.0:
        raise NegativeOrderError(f"negative Bessel order nu0={nu0:.6g} for s={params.s:g}, n={n}")
    if dimension is None:
        dimension = build_hamiltonian(params, n).dimension
    base = math.floor(nu0)
    alpha = nu0 - base
    seq = bessel_j_sequence(alpha, x, base + dimension)
    raw = seq.values[base: base + dimension + 1].copy()
    boundary = abs(float(raw[0])) / math.sqrt(float(np.dot(raw, raw)))
    if boundary > BOUNDARY_TOLERANCE:
        logger.warning("normalised psi_0 = %.2e (s=%g, n=%d), root may be loose", boundary, params.s, n)
    raw[0] = 0.0

    norm_check = None
    if check_normalization:
        direct = float(np.sum(raw[1:] ** 2))
        closed = 0.5 * x * bessel_j(nu0 + 1.0, x) * bessel_j_dnu(nu0, x)
        norm_check = abs(direct - closed) / direct
        if norm_check > _NORM_CHECK_TOLERANCE:
            logger.warning("normalisation closed form deviates by %.2e (s=%g, n=%d)", norm_check, params.s, n)

    samples = raw / math.sqrt(float(np.dot(raw, raw)))
    if samples[1] < 0.0:
        samples = -samples
    return PolymerState(level=int(n), params=params, energy=eps, samples=samples,
                        method="bessel", norm_check=norm_check)


def polymer_state(params: DimensionlessParams, n: int, method: str = "lattice",
                  dimension: Optional[int] = None) -> PolymerState:
    """Level n from either solver route (``lattice`` or ``bessel``)."""
    if method == "lattice":
        return lattice_state(params, n, dimension=dimension)
    if method == "bessel":
        return polymer_wavefunction(params, n, dimension=dimension)
    raise DomainError(f"unknown method {method!r}, expected 'lattice' or 'bessel'")


def cos_expectation(state: PolymerState) -> float:
    """<cos(p lambda / hbar)> = 1/2 sum_mu psi_mu (psi_{mu+1} + psi_{mu-1})."""
    psi = state.samples
    up = float(np.dot(psi[1:-1], psi[2:]))      # mu = 1..N-1 with psi_{mu+1}
    down = float(np.dot(psi[1:], psi[:-1]))     # mu = 1..N with psi_{mu-1}
    return 0.5 * (up + down)


# ---------------------------------------------------------------------------
# Table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectrumCell:
    s: float
    n: int
    method: str                 # lattice | bessel | perturbative
    value: Optional[float]
    status: str = "ok"          # ok | negative-order | unsupported-scale | failed
    reference: Optional[float] = None
    flag: str = "extrapolated"  # ok | deviates | suspect | extrapolated | failed
    note: str = ""

    def as_row(self) -> dict:
        deviation = None
        if self.value is not None and self.reference is not None:
            deviation = self.value - self.reference
        return {"s": self.s, "n": self.n, "method": self.method, "epsilon": self.value,
                "status": self.status, "reference": self.reference, "deviation": deviation,
                "flag": self.flag, "note": self.note}


@dataclass
class SpectrumTable:
    cells: List[SpectrumCell] = field(default_factory=list)

    def value(self, s: float, n: int, method: str) -> Optional[float]:
        for cell in self.cells:
            if cell.s == s and cell.n == n and cell.method == method:
                return cell.value
        return None

    def dual_route_agreement(self) -> Dict[float, float]:
        """Max |eps_bessel - eps_lattice| per s over cells where both exist."""
        out: Dict[float, float] = {}
        for cell in self.cells:
            if cell.method != "bessel" or cell.value is None:
                continue
            lat = self.value(cell.s, cell.n, "lattice")
            if lat is None:
                continue
            out[cell.s] = max(out.get(cell.s, 0.0), abs(cell.value - lat))
        return out

    @property
    def failed(self) -> List[SpectrumCell]:
        return [c for c in self.cells if c.status == "failed"]

    def rows(self) -> List[dict]:
        return [c.as_row() for c in self.cells]


def _reference(s: float, n: int) -> Optional[float]:
    if float(s).is_integer() and int(s) in PUBLISHED_LEVELS and n <= 10:
        return PUBLISHED_LEVELS[int(s)][n - 1]
    return None


def _flag(s: float, n: int, value: Optional[float], reference: Optional[float], tolerance: float) -> str:
    if value is None:
        return "failed"
    if reference is None:
        return "extrapolated"
    if (int(s), n) in SUSPECT_CELLS:
        return "suspect"
    return "ok" if abs(value - reference) <= tolerance else "deviates"


def _spectrum_row(task: Tuple[float, int, int]) -> List[SpectrumCell]:
    """All cells of one s (worker entry point, must stay importable for Pool)."""
    s, n_max, max_dimension = task
    params = DimensionlessParams(s)
    cells: List[SpectrumCell] = []
    try:
        H = build_hamiltonian(params, n_max, max_dimension=max_dimension)
        lattice = eigenvalues_sturm(H, n_max)
    except BouncerError as exc:
        logger.warning("lattice route failed for s=%g: %s", s, exc)
        for n in range(1, n_max + 1):
            cells.append(SpectrumCell(s, n, "lattice", None, "failed", _reference(s, n), "failed", str(exc)))
        return cells

    for n, eps in enumerate(lattice, start=1):
        ref = _reference(s, n)
        cells.append(SpectrumCell(s, n, "lattice", eps, "ok", ref, _flag(s, n, eps, ref, TABLE_TOLERANCE)))

        try:
            value = polymer_energy_bessel(params, n, seed=eps)
            cells.append(SpectrumCell(s, n, "bessel", value, "ok", ref, _flag(s, n, value, ref, TABLE_TOLERANCE)))
        except NegativeOrderError as exc:
            flag = "suspect" if (int(s), n) in SUSPECT_CELLS else "extrapolated"
            cells.append(SpectrumCell(s, n, "bessel", None, "negative-order", ref, flag, str(exc)))
            pert = continuum_energy(params, n) + perturbative_shift(params, n)
            tol = PERTURBATIVE_TOLERANCE
            cells.append(SpectrumCell(s, n, "perturbative", pert, "ok", ref, _flag(s, n, pert, ref, tol)))
        except UnsupportedScaleError as exc:
            cells.append(SpectrumCell(s, n, "bessel", None, "unsupported-scale", ref, "extrapolated", str(exc)))
        except BouncerError as exc:
            logger.warning("bessel route failed for s=%g n=%d: %s", s, n, exc)
            cells.append(SpectrumCell(s, n, "bessel", None, "failed", ref, "failed", str(exc)))
    return cells


def spectrum_table(s_list: Sequence[float], n_max: int, workers: int = 1, progress: bool = False,
                   max_dimension: int = DEFAULT_MAX_DIMENSION) -> SpectrumTable:
    """Levels 1..n_max for every s, by both routes where feasible.

    Cells whose Bessel order would be negative (eps >= 1, all of s = 1 and
    the top of s = 2) carry the perturbative value instead. Failures are
    recorded per cell; the table is always returned.
    """
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max!r}")
    tasks = [(float(s), int(n_max), int(max_dimension)) for s in s_list]
    for s, _, _ in tasks:
        DimensionlessParams(s)  # validate before spawning workers

    table = SpectrumTable()
    if workers > 1 and len(tasks) > 1:
        with Pool(processes=workers) as pool:
            rows = pool.imap(_spectrum_row, tasks)
            for cells in tqdm(rows, total=len(tasks), desc="spectrum", disable=not progress):
                table.cells.extend(cells)
    else:
        for task in tqdm(tasks, desc="spectrum", disable=not progress):
            table.cells.extend(_spectrum_row(task))
    return table


# ---------------------------------------------------------------------------
# Density profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DensityProfile:
    level: int
    s: float
    lattice_z: np.ndarray
    lattice_density: np.ndarray
    continuum_z: np.ndarray
    continuum_density: np.ndarray
    continuum_at_lattice: np.ndarray

    @property
    def spacing(self) -> float:
        return float(self.lattice_z[1] - self.lattice_z[0])

    def lattice_integral(self) -> float:
        return float(np.sum(self.lattice_density) * self.spacing)

    def deviation(self) -> float:
        """sup over lattice points of |rho_lattice - rho_continuum|, relative to the continuum peak."""
        peak = max(float(np.max(self.continuum_density)), float(np.max(self.continuum_at_lattice)))
        return float(np.max(np.abs(self.lattice_density - self.continuum_at_lattice)) / peak)


def density_profile(state: PolymerState, ctx: PhysicalContext = NEUTRON, resolution: int = 400) -> DensityProfile:
    """Lattice density psi_mu^2 / lambda at z = lambda mu with the continuum |psi_n(z)|^2 overlay."""
    if resolution < 2:
        raise DomainError(f"resolution must be >= 2, got {resolution!r}")
    lam = ctx.lattice_spacing(state.params)
    cont = continuum_state(state.level, ctx)
    lattice_z = lam * state.mu
    z_max = min(float(lattice_z[-1]), ctx.l0 * (abs(cont.airy_zero) + 8.0))
    grid = np.linspace(0.0, z_max, int(resolution))
    return DensityProfile(
        level=state.level,
        s=state.params.s,
        lattice_z=lattice_z,
        lattice_density=state.samples ** 2 / lam,
        continuum_z=grid,
        continuum_density=cont.wavefunction(grid) ** 2,
        continuum_at_lattice=cont.wavefunction(lattice_z) ** 2,
    )
