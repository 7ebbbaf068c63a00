"""Quench dynamics of bosonic coherent states in a deep optical lattice.

Modules
-------
states
    Generalized (fixed-number) and Glauber coherent states, lattice models.
correlators
    Closed-form two-point correlators and their thermodynamic limit.
gcs_loschmidt
    Loschmidt amplitude by enumeration and by generating functions, and the
    dynamical free-energy density.
glauber_dynamics
    Glauber-state survival and cross correlations, Fourier relations.
fock_oracle
    Brute-force Fock-sector reference results, including Bose-Hubbard.
phasespace
    Phase-space distribution grids.
"""

__version__ = "0.1.0"

from .kernels import BACKEND  # noqa: E402,F401
