"""Coherent-state families, lattice models and the maps between them.

Two state families live here:

``GcsState``
    Generalized (SU(M)) coherent state ``(sum_j xi_j a_j^dag)^S |vac> / sqrt(S!)``
    with a fixed particle number ``S`` and unit-norm amplitudes ``xi``.
``MmgsState``
    Multi-mode Glauber state, a product of single-mode coherent states with
    amplitudes ``alpha``; the total particle number is Poisson distributed
    with mean ``ntilde = sum |alpha_i|^2``.

Time is always the dimensionless ``theta = U t``.
"""

from dataclasses import dataclass, field
from math import comb, exp, lgamma, log

import numpy as np

from .errors import DimensionOverflowError

NORM_TOL = 1e-12
INT64_MAX = 2**63 - 1


def _frozen_complex(values):
    arr = np.array(values, dtype=np.complex128).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class GcsState:
    """Generalized coherent state with ``S`` bosons on ``M = len(xi)`` modes."""

    S: int
    xi: np.ndarray

    def __post_init__(self):
        if int(self.S) != self.S or self.S < 0:
            raise ValueError(f"particle number must be a non-negative integer, got {self.S!r}")
        object.__setattr__(self, "S", int(self.S))
        xi = _frozen_complex(self.xi)
        if xi.size == 0:
            raise ValueError("a GCS needs at least one mode")
        norm = float(np.sum(np.abs(xi) ** 2))
        if abs(norm - 1.0) >= NORM_TOL:
            raise ValueError(f"sum |xi_j|^2 = {norm!r} differs from 1 by more than {NORM_TOL}")
        object.__setattr__(self, "xi", xi)

    @classmethod
    def normalized(cls, S, xi):
        """Build a state from amplitudes that are only proportional to ``xi``."""
        xi = np.asarray(xi, dtype=np.complex128).reshape(-1)
        norm = np.sqrt(np.sum(np.abs(xi) ** 2))
        if norm == 0.0:
            raise ValueError("cannot normalize an all-zero amplitude vector")
        return cls(S, xi / norm)

    @property
    def M(self):
        return self.xi.size

    @property
    def populations(self):
        """Site occupation probabilities ``|xi_j|^2``."""
        return np.abs(self.xi) ** 2

    def is_homogeneous(self):
        return bool(np.all(self.xi == self.xi[0]))


@dataclass(frozen=True)
class MmgsState:
    """Multi-mode Glauber state; ``ntilde`` is derived from ``alpha``."""

    alpha: np.ndarray
    ntilde: float = field(init=False)

    def __post_init__(self):
        alpha = _frozen_complex(self.alpha)
        if alpha.size == 0:
            raise ValueError("an MMGS needs at least one mode")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "ntilde", float(np.sum(np.abs(alpha) ** 2)))

    @property
    def M(self):
        return self.alpha.size


@dataclass(frozen=True)
class KerrLattice:
    """Deep-lattice Hamiltonian ``(U/2) sum_i n_i (n_i - 1)`` on ``M`` sites."""

    U: float
    M: int

    def __post_init__(self):
        if not self.U > 0:
            raise ValueError(f"KerrLattice needs U > 0, got {self.U!r}")
        if int(self.M) != self.M or self.M < 1:
            raise ValueError(f"site count must be a positive integer, got {self.M!r}")


@dataclass(frozen=True)
class BoseHubbardModel:
    """On-site Kerr term plus nearest-neighbour hopping ``-J (a_i^dag a_j + h.c.)``."""

    U: float
    J: float
    M: int
    boundary: str = "periodic"

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise ValueError(f"site count must be a positive integer, got {self.M!r}")
        if self.J < 0:
            raise ValueError(f"hopping amplitude must be non-negative, got {self.J!r}")
        if self.boundary not in ("periodic", "open"):
            raise ValueError(f"boundary must be 'periodic' or 'open', got {self.boundary!r}")

    def bonds(self):
        """Distinct nearest-neighbour pairs ``(i, j)`` with ``i < j``."""
        pairs = {(i, i + 1) for i in range(self.M - 1)}
        if self.boundary == "periodic" and self.M > 2:
            pairs.add((0, self.M - 1))
        return sorted(pairs)


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing grid of dimensionless times ``theta = U t``."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64).reshape(-1)
        if vals.size == 0:
            raise ValueError("time grid is empty")
        if vals.size > 1 and not np.all(np.diff(vals) > 0):
            raise ValueError("time grid must be strictly increasing")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def uniform(cls, start, stop, count):
        """``count`` equispaced points from ``start`` to ``stop`` inclusive."""
        return cls(np.linspace(start, stop, int(count)))

    @property
    def count(self):
        return self.values.size

    @property
    def spacing(self):
        if self.count < 2:
            return 0.0
        return float(self.values[1] - self.values[0])


@dataclass(frozen=True)
class ComplexSeries:
    """Complex amplitudes sampled on a grid (times or x nodes)."""

    grid: np.ndarray
    values: np.ndarray
    unit: str = "Ut"


def homogeneous_gcs(S, M):
    """GCS with all ``xi_j = 1/sqrt(M)`` (the zero-quasi-momentum condensate)."""
    if M < 1:
        raise ValueError(f"need at least one mode, got M={M!r}")
    return GcsState(S, np.full(M, 1.0 / np.sqrt(M)))


def homogeneous_mmgs(lam, M):
    """MMGS with every ``alpha_j = sqrt(lam)`` (real, positive phase convention)."""
    if lam < 0:
        raise ValueError(f"filling factor must be non-negative, got {lam!r}")
    if M < 1:
        raise ValueError(f"need at least one mode, got M={M!r}")
    return MmgsState(np.full(M, np.sqrt(lam)))


def log_poisson(mean, k):
    """``log(e^-mean mean^k / k!)``; exact zero mean gives 0 at k=0, -inf else."""
    if mean == 0:
        return 0.0 if k == 0 else -np.inf
    return k * log(mean) - mean - lgamma(k + 1)


def gcs_from_mmgs(state, S):
    """Project an MMGS on the ``S``-particle sector.

    Returns
    -------
    (GcsState, float)
        The normalized GCS with ``xi = alpha / sqrt(ntilde)`` and the Poisson
        weight ``P(S) = e^-ntilde ntilde^S / S!`` of that sector.
    """
    if int(S) != S or S < 0:
        raise ValueError(f"particle number must be a non-negative integer, got {S!r}")
    if state.ntilde == 0:
        if S > 0:
            raise ValueError("vacuum MMGS has no weight in sectors with S > 0")
        return homogeneous_gcs(0, state.M), 1.0
    xi = state.alpha / np.sqrt(state.ntilde)
    return GcsState.normalized(S, xi), exp(log_poisson(state.ntilde, S))


def hilbert_dim(S, M, limit=INT64_MAX):
    """Number of occupation vectors of ``S`` bosons on ``M`` modes, C(M+S-1, M-1).

    Raises ``DimensionOverflowError`` when the exact count exceeds ``limit``.
    """
    if int(S) != S or S < 0:
        raise ValueError(f"S must be a non-negative integer, got {S!r}")
    if int(M) != M or M < 1:
        raise ValueError(f"M must be a positive integer, got {M!r}")
    dim = comb(int(M) + int(S) - 1, int(M) - 1)
    if limit is not None and dim > limit:
        raise DimensionOverflowError(f"hilbert_dim(S={S}, M={M}) = {dim} exceeds {limit}")
    return dim
