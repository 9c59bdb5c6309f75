"""
Lattice oracle for the polymer bouncer.

The stationary difference equation

    eps * psi_mu = (1 + mu / (2 upsilon)) psi_mu - (psi_{mu+1} + psi_{mu-1}) / 2,   psi_0 = 0,

is a symmetric tridiagonal eigenproblem on mu = 1..N. Eigenvalues come from
Sturm counts + bisection, eigenvectors from inverse iteration; nothing
here touches Bessel functions, which is what makes it an independent check
of the quantization-condition solver in ``bouncer.spectrum``.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from core.errors import ConvergenceError, DomainError, UnsupportedScaleError
from bouncer.specfun import airy_zero

__all__ = [
    "DimensionlessParams",
    "TridiagonalOperator",
    "PolymerState",
    "DEFAULT_MAX_DIMENSION",
    "build_hamiltonian",
    "eigenvalues_sturm",
    "eigenvector_inverse_iteration",
    "lattice_state",
    "lattice_states",
]

logger = logging.getLogger(__name__)

DEFAULT_MAX_DIMENSION = 50_000_000
OFF_DIAGONAL = -0.5
BISECTION_WIDTH = 1e-12
INVERSE_ITERATION_SEED = 20240611
_SINGULAR_NUDGE = 1e-13


@dataclass(frozen=True)
class DimensionlessParams:
    """Lattice ratio s = l0 / lambda and upsilon = s^3."""

    s: float
    upsilon: float = field(init=False)

    def __post_init__(self):
        s = float(self.s)
        if not math.isfinite(s) or s < 1.0:
            raise DomainError(f"lattice ratio s must be finite and >= 1, got {self.s!r}")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "upsilon", s ** 3)

    @classmethod
    def from_length(cls, lam: float, l0: float) -> "DimensionlessParams":
        """Params for lattice spacing ``lam`` given the gravitational length ``l0``."""
        if lam <= 0 or l0 <= 0:
            raise DomainError(f"lengths must be positive, got lam={lam!r}, l0={l0!r}")
        return cls(l0 / lam)

    @property
    def bessel_argument(self) -> float:
        """2 upsilon, the fixed argument of the Bessel solution."""
        return 2.0 * self.upsilon

    def lattice_spacing(self, l0: float) -> float:
        return l0 / self.s


@dataclass(frozen=True)
class TridiagonalOperator:
    """Truncated lattice Hamiltonian on mu = 1..N (row 0 removed by psi_0 = 0)."""

    params: DimensionlessParams
    diagonal: np.ndarray
    off_diagonal: float = OFF_DIAGONAL

    @property
    def dimension(self) -> int:
        return len(self.diagonal)

    def gershgorin_bounds(self):
        spread = 2.0 * abs(self.off_diagonal)
        return float(self.diagonal[0] - spread), float(self.diagonal[-1] + spread)

    def sturm_count(self, shifts) -> np.ndarray:
        """Number of eigenvalues strictly below each shift (vectorised over shifts)."""
        sigma = np.atleast_1d(np.asarray(shifts, dtype=float))
        e2 = self.off_diagonal * self.off_diagonal
        count = np.zeros(sigma.shape, dtype=np.int64)
        q = self.diagonal[0] - sigma
        for i in range(self.dimension):
            if i:
                q = (self.diagonal[i] - sigma) - e2 / q
            q = np.where(q == 0.0, 1e-300, q)
            count += q < 0.0
        return count

    def matvec(self, vec: np.ndarray) -> np.ndarray:
        out = self.diagonal * vec
        out[:-1] += self.off_diagonal * vec[1:]
        out[1:] += self.off_diagonal * vec[:-1]
        return out


@dataclass(frozen=True)
class PolymerState:
    """Normalised lattice wave function psi_mu, mu = 0..N, with psi_0 = 0 and psi_1 > 0."""

    level: int
    params: DimensionlessParams
    energy: float
    samples: np.ndarray
    method: str = "lattice"
    norm_check: Optional[float] = None

    @property
    def dimension(self) -> int:
        return len(self.samples) - 1

    @property
    def mu(self) -> np.ndarray:
        return np.arange(len(self.samples))

    def norm(self) -> float:
        return float(np.dot(self.samples, self.samples))

    def mean_mu(self) -> float:
        return float(np.dot(self.mu, self.samples ** 2))

    def node_count(self) -> int:
        """Interior sign changes, ignoring the numerically flat tail."""
        psi = self.samples[1:]
        significant = psi[np.abs(psi) > 1e-10 * np.max(np.abs(psi))]
        return int(np.count_nonzero(np.diff(np.sign(significant)) != 0))

    def residual(self) -> float:
        """||(H - eps) psi|| on the state's own truncation."""
        H = TridiagonalOperator(self.params, _diagonal(self.params, self.dimension))
        psi = self.samples[1:]
        return float(np.linalg.norm(H.matvec(psi) - self.energy * psi))


def _diagonal(params: DimensionlessParams, dimension: int) -> np.ndarray:
    mu = np.arange(1, dimension + 1, dtype=float)
    return 1.0 + mu / (2.0 * params.upsilon)


def _energy_estimate(params: DimensionlessParams, n: int) -> float:
    # continuum level minus the (negative) perturbative shift: an upper bound on eps_n
    a_n = airy_zero(n)
    return -a_n / (2.0 * params.s ** 2) + a_n ** 2 / (120.0 * params.s ** 4)


def build_hamiltonian(params: DimensionlessParams, n_levels: int,
                      max_dimension: int = DEFAULT_MAX_DIMENSION,
                      dimension: Optional[int] = None) -> TridiagonalOperator:
    """Tridiagonal operator large enough to hold the lowest ``n_levels`` states.

    N = ceil(2 upsilon eps_est) + ceil(10 (2 upsilon)^(1/3)) + 50 puts the
    cut well past the classical turning point of level ``n_levels``.
    ``dimension`` overrides N (used for truncation-sensitivity checks).
    """
    if isinstance(n_levels, bool) or int(n_levels) != n_levels or n_levels < 1:
        raise DomainError(f"n_levels must be a positive integer, got {n_levels!r}")
    two_upsilon = params.bessel_argument
    if dimension is None:
        eps_est = _energy_estimate(params, int(n_levels))
        dimension = (math.ceil(two_upsilon * eps_est) + math.ceil(10.0 * two_upsilon ** (1.0 / 3.0)) + 50)
    dimension = int(dimension)
    if dimension > max_dimension:
        raise UnsupportedScaleError(
            f"lattice truncation N={dimension} exceeds the cap {max_dimension} (s={params.s:g})")
    if dimension < n_levels:
        raise DomainError(f"dimension {dimension} cannot hold {n_levels} levels")
    logger.debug("build_hamiltonian s=%g n_levels=%d N=%d", params.s, n_levels, dimension)
    return TridiagonalOperator(params=params, diagonal=_diagonal(params, dimension))


def eigenvalues_sturm(H: TridiagonalOperator, k: int) -> List[float]:
    """The k smallest eigenvalues by Sturm-sequence bisection, ascending."""
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    if k > H.dimension:
        raise DomainError(f"requested k={k} eigenvalues from an operator of dimension {H.dimension}")
    lo_bound, hi_bound = H.gershgorin_bounds()
    index = np.arange(1, int(k) + 1)
    lo = np.full(len(index), lo_bound)
    hi = np.full(len(index), hi_bound)
    iterations = int(math.ceil(math.log2((hi_bound - lo_bound) / BISECTION_WIDTH))) + 1
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        below = H.sturm_count(mid) >= index
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
    return [float(v) for v in 0.5 * (lo + hi)]


def _shifted_solve(H: TridiagonalOperator, epsilon: float, rhs: np.ndarray) -> np.ndarray:
    n = H.dimension
    banded = np.zeros((3, n))
    banded[0, 1:] = H.off_diagonal
    banded[1, :] = H.diagonal - epsilon
    banded[2, :-1] = H.off_diagonal
    out = solve_banded((1, 1), banded, rhs)
    if not np.all(np.isfinite(out)):
        raise LinAlgError("non-finite inverse iteration step")
    return out


def eigenvector_inverse_iteration(H: TridiagonalOperator, epsilon: float,
                                  level: Optional[int] = None) -> PolymerState:
    """Eigenvector for an eigenvalue estimate ``epsilon`` (two inverse-iteration steps)."""
    if level is None:
        level = int(H.sturm_count(epsilon + 1e-9)[0])
        if level < 1:
            raise DomainError(f"epsilon={epsilon!r} lies below the spectrum")

    rng = np.random.default_rng(INVERSE_ITERATION_SEED)
    shift = float(epsilon)
    for attempt in range(3):
        vec = rng.uniform(0.5, 1.5, H.dimension)
        try:
            for _ in range(2):
                vec = _shifted_solve(H, shift, vec)
                vec /= np.linalg.norm(vec)
            break
        except LinAlgError:
            logger.debug("singular shifted solve at eps=%.16g, nudging", shift)
            shift += _SINGULAR_NUDGE
    else:
        raise ConvergenceError(f"inverse iteration failed near epsilon={epsilon!r}")

    if vec[0] < 0.0:
        vec = -vec
    samples = np.concatenate(([0.0], vec))
    return PolymerState(level=level, params=H.params, energy=float(epsilon), samples=samples)


def lattice_states(params: DimensionlessParams, n_max: int,
                   max_dimension: int = DEFAULT_MAX_DIMENSION,
                   dimension: Optional[int] = None) -> List[PolymerState]:
    """Levels 1..n_max on one common truncation."""
    H = build_hamiltonian(params, n_max, max_dimension=max_dimension, dimension=dimension)
    energies = eigenvalues_sturm(H, n_max)
    return [eigenvector_inverse_iteration(H, eps, level=i) for i, eps in enumerate(energies, start=1)]


def lattice_state(params: DimensionlessParams, n: int,
                  max_dimension: int = DEFAULT_MAX_DIMENSION,
                  dimension: Optional[int] = None) -> PolymerState:
    """Level n from the lattice route."""
    H = build_hamiltonian(params, n, max_dimension=max_dimension, dimension=dimension)
    eps = eigenvalues_sturm(H, n)[-1]
    return eigenvector_inverse_iteration(H, eps, level=n)
