"""Brute-force reference results in a fixed-particle-number Fock sector.

Everything here works on explicit occupation vectors and dense matrices so
it shares no summation code with the generating-function path. Sectors are
small by construction (guards default to a few thousand states).
"""

from dataclasses import dataclass, field
from math import lgamma, pi

import numpy as np

from .errors import DimensionGuardError, TailToleranceError
from .states import ComplexSeries, gcs_from_mmgs, hilbert_dim

ORACLE_GUARD = 2_000_000
DENSE_GUARD = 6000
ASSEMBLY_TAIL = 1e-12


def _occupations(S, M):
    """Occupation vectors of S bosons on M modes, reverse-lexicographic."""
    if M == 1:
        yield (S,)
        return
    for first in range(S, -1, -1):
        for rest in _occupations(S - first, M - 1):
            yield (first,) + rest


class FockSector:
    """Basis of the ``S``-particle sector on ``M`` modes.

    ``basis[k]`` is the k-th occupation vector, ordered reverse
    lexicographically: for ``S = 2, M = 2`` the order is (2,0), (1,1), (0,2).
    """

    def __init__(self, S, M, guard=ORACLE_GUARD):
        dim = hilbert_dim(S, M, limit=None)
        if dim > guard:
            raise DimensionGuardError(f"sector (S={S}, M={M}) has {dim} states, guard is {guard}")
        self.S = int(S)
        self.M = int(M)
        self.basis = np.array(list(_occupations(self.S, self.M)), dtype=np.int64).reshape(dim, self.M)
        self._index = {tuple(row): k for k, row in enumerate(self.basis.tolist())}

    def __len__(self):
        return self.basis.shape[0]

    def index(self, occupation):
        """Position of an occupation vector in the basis."""
        return self._index[tuple(int(n) for n in occupation)]

    def occupation(self, k):
        return tuple(int(n) for n in self.basis[k])

    def to_dict(self):
        return {"S": self.S, "M": self.M, "basis": self.basis.tolist()}


def _check_sector(state, sector):
    if state.S != sector.S or state.M != sector.M:
        raise ValueError(
            f"state (S={state.S}, M={state.M}) does not match sector (S={sector.S}, M={sector.M})"
        )


def gcs_sector_vector(state, sector):
    """Fock coefficients ``sqrt(S!/prod n_i!) prod xi_i^{n_i}`` of a GCS."""
    _check_sector(state, sector)
    n = sector.basis
    lg = np.array([lgamma(k + 1) for k in range(sector.S + 1)])
    mult = np.exp(0.5 * (lg[sector.S] - lg[n].sum(axis=1)))
    amp = np.prod(state.xi[None, :] ** n, axis=1)
    return mult * amp


def kerr_energies(sector, phase="kerr"):
    """Diagonal energies in units of ``U``: ``(1/2) sum n (n-1)`` or ``(1/2) sum n^2``."""
    n = sector.basis
    if phase == "kerr":
        return 0.5 * np.sum(n * (n - 1), axis=1)
    if phase == "n2":
        return 0.5 * np.sum(n * n, axis=1)
    raise ValueError(f"unknown phase convention {phase!r}")


def deep_lattice_autocorr_oracle(state, theta, phase="n2", guard=ORACLE_GUARD):
    """``sum_n |c_n|^2 exp(-i E_n theta)`` over the explicit sector basis."""
    sector = FockSector(state.S, state.M, guard)
    v = gcs_sector_vector(state, sector)
    E = kerr_energies(sector, phase)
    th = np.asarray(theta, dtype=np.float64)
    out = np.exp(-1j * np.multiply.outer(th, E)) @ (np.abs(v) ** 2)
    return out[()] if np.ndim(out) == 0 else out


def tpcf_oracle(state, theta, i, j, guard=ORACLE_GUARD):
    """``<a_i^dag a_j>`` after Kerr evolution, from the explicit state vector."""
    sector = FockSector(state.S, state.M, guard)
    v = gcs_sector_vector(state, sector)
    E = kerr_energies(sector, "kerr")
    th = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    psi = v[None, :] * np.exp(-1j * np.outer(th, E))
    out = np.zeros(th.size, dtype=np.complex128)
    for k, occ in enumerate(sector.basis.tolist()):
        if occ[j] == 0:
            continue
        amp = np.sqrt(occ[j] * (occ[i] + 1 if i != j else occ[i]))
        tgt = list(occ)
        tgt[j] -= 1
        tgt[i] += 1
        out += np.conj(psi[:, sector.index(tgt)]) * amp * psi[:, k]
    return out[0] if np.ndim(theta) == 0 else out


@dataclass
class SectorOperator:
    """Dense Hermitian operator on a Fock sector (energy units)."""

    sector: FockSector
    matrix: np.ndarray
    _eig: tuple = field(default=None, init=False, repr=False)

    def hermiticity_error(self):
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def eigh(self):
        if self._eig is None:
            self._eig = np.linalg.eigh(self.matrix)
        return self._eig


def build_bose_hubbard(sector, model, guard=DENSE_GUARD):
    """Dense Bose-Hubbard matrix on a sector.

    Diagonal ``(U/2) sum n_i (n_i - 1)``; each bond ``(i, j)`` adds
    ``-J sqrt((n_i + 1) n_j)`` for ``a_i^dag a_j`` and its conjugate.
    """
    if sector.M != model.M:
        raise ValueError(f"sector has M={sector.M} but the model has M={model.M}")
    D = len(sector)
    if D > guard:
        raise DimensionGuardError(f"dense sector of {D} states exceeds the guard {guard}")
    H = np.zeros((D, D))
    n = sector.basis
    H[np.arange(D), np.arange(D)] = 0.5 * model.U * np.sum(n * (n - 1), axis=1)
    if model.J != 0:
        for k, occ in enumerate(n.tolist()):
            for a, b in model.bonds():
                for i, j in ((a, b), (b, a)):
                    if occ[j] == 0:
                        continue
                    tgt = list(occ)
                    tgt[j] -= 1
                    tgt[i] += 1
                    H[sector.index(tgt), k] += -model.J * np.sqrt((occ[i] + 1) * occ[j])
    return SectorOperator(sector, H)


def _energy_unit(model, energy_unit):
    if energy_unit is None:
        if model.U == 0:
            raise ValueError("U = 0: pass an explicit energy_unit (e.g. J) to set the time scale")
        return float(model.U)
    if energy_unit <= 0:
        raise ValueError(f"energy_unit must be positive, got {energy_unit!r}")
    return float(energy_unit)


def _spectral_weights(state, model, guard):
    sector = FockSector(state.S, state.M, guard=max(guard, ORACLE_GUARD))
    op = build_bose_hubbard(sector, model, guard)
    evals, evecs = op.eigh()
    v = gcs_sector_vector(state, sector)
    return evals, np.abs(evecs.conj().T @ v) ** 2


def sector_autocorr(state, model, theta_grid, energy_unit=None, guard=DENSE_GUARD):
    """``<psi| exp(-i H theta / unit) |psi>`` by dense eigendecomposition.

    Time is ``theta = unit * t`` with ``unit = U`` unless ``energy_unit`` is
    given (required when ``U = 0``).
    """
    unit = _energy_unit(model, energy_unit)
    th = np.asarray(getattr(theta_grid, "values", theta_grid), dtype=np.float64).reshape(-1)
    evals, w = _spectral_weights(state, model, guard)
    vals = np.exp(-1j * np.outer(th, evals / unit)) @ w
    label = "Ut" if energy_unit is None else "t*unit"
    return ComplexSeries(th, vals, unit=label)


def _assembly_cut(ntilde, tol=ASSEMBLY_TAIL):
    from scipy.stats import poisson

    return int(poisson.isf(tol, ntilde)) + 1


class AssembledProvider:
    """MMGS cross correlation assembled from dense sector amplitudes.

    ``provider(x, theta) = e^{-N} sum_{S' <= S_cut} N^{S'}/S'! e^{2 pi i x S'} A_{S'}(theta)``.
    Sector eigendecompositions are computed once and reused.
    """

    def __init__(self, state, model, S_cut=None, energy_unit=None, guard=DENSE_GUARD):
        from scipy.stats import poisson

        if state.M != model.M:
            raise ValueError(f"state has M={state.M} but the model has M={model.M}")
        N = state.ntilde
        if S_cut is None:
            S_cut = _assembly_cut(N) if N > 0 else 0
        tail = float(poisson.sf(S_cut, N)) if N > 0 else 0.0
        if tail >= ASSEMBLY_TAIL:
            raise TailToleranceError(
                f"Poisson({N:.6g}) mass beyond S_cut={S_cut} is {tail:.3e} >= {ASSEMBLY_TAIL:.0e}"
            )
        self.unit = _energy_unit(model, energy_unit)
        self.S_cut = int(S_cut)
        self.sectors = []
        for s in range(self.S_cut + 1):
            if N == 0 and s > 0:
                break
            gcs, weight = gcs_from_mmgs(state, s)
            evals, w = _spectral_weights(gcs, model, guard)
            self.sectors.append((s, weight, evals / self.unit, w))

    def sector_amplitude(self, s, theta):
        _, _, evals, w = self.sectors[s]
        th = np.asarray(theta, dtype=np.float64)
        return np.exp(-1j * np.multiply.outer(th, evals)) @ w

    def __call__(self, x, theta):
        x, theta = np.broadcast_arrays(np.asarray(x, dtype=np.float64),
                                       np.asarray(theta, dtype=np.float64))
        out = np.zeros(x.shape, dtype=np.complex128)
        # fixed ascending-S' order for reproducibility
        for s, weight, _, _ in self.sectors:
            out += weight * np.exp(2j * pi * x * s) * self.sector_amplitude(s, theta)
        return out


def mmgs_cross_corr_assembled(state, model, x, theta, S_cut=None, energy_unit=None):
    """One-shot evaluation of ``AssembledProvider(state, model, S_cut)(x, theta)``."""
    return AssembledProvider(state, model, S_cut, energy_unit)(x, theta)
