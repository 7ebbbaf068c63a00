"""Randomized cross-checks between independent code paths.

Used by ``kerrquench oracle-check`` and by the test-suite. Every check
reports the largest observed error against a fixed tolerance; inputs come
from a seeded ``numpy.random.Generator`` so a run is reproducible.
"""

from dataclasses import dataclass
from math import pi

import numpy as np

from .correlators import tpcf_gcs
from .fock_oracle import AssembledProvider, deep_lattice_autocorr_oracle, sector_autocorr, tpcf_oracle
from .gcs_loschmidt import ScaledPolynomial, autocorr_enumerated, autocorr_genfun, convolve
from .glauber_dynamics import (
    DeepLatticeProvider,
    G_of_x,
    XGrid,
    cross_corr_single,
    fourier_autocorr_exact,
)
from .states import BoseHubbardModel, GcsState, gcs_from_mmgs, homogeneous_mmgs


@dataclass(frozen=True)
class CheckResult:
    name: str
    error: float
    tol: float

    @property
    def passed(self):
        return bool(self.error <= self.tol)


def random_gcs(rng, S, M):
    xi = rng.normal(size=M) + 1j * rng.normal(size=M)
    return GcsState.normalized(S, xi)


def run_property_suite(S_max=6, M_max=4, theta_count=32, seed=20240611):
    """Run every cross-check on states with ``S <= S_max``, ``M <= M_max``."""
    rng = np.random.default_rng(seed)
    theta = np.linspace(0.0, 4.0 * pi, theta_count)
    err = {k: 0.0 for k in (
        "genfun_vs_enumeration", "oracle_vs_enumeration", "tpcf_vs_oracle", "unitarity",
        "initial_value", "time_reversal", "tpcf_conjugate_symmetry",
    )}
    for S in range(1, S_max + 1):
        for M in range(1, M_max + 1):
            st = random_gcs(rng, S, M)
            enum = autocorr_enumerated(st, theta)
            gen = autocorr_genfun(st, theta)
            err["genfun_vs_enumeration"] = max(err["genfun_vs_enumeration"], np.max(np.abs(gen - enum)))
            orc = deep_lattice_autocorr_oracle(st, theta)
            err["oracle_vs_enumeration"] = max(err["oracle_vs_enumeration"], np.max(np.abs(orc - enum)))
            err["unitarity"] = max(err["unitarity"], float(np.max(np.abs(gen)) - 1.0), 0.0)
            err["initial_value"] = max(err["initial_value"], abs(autocorr_genfun(st, 0.0) - 1.0))
            back = autocorr_genfun(st, -theta)
            err["time_reversal"] = max(err["time_reversal"], np.max(np.abs(back - np.conj(gen))))
            if M >= 2:
                i, j = rng.choice(M, size=2, replace=False)
                a = tpcf_gcs(st, theta, i, j)
                b = tpcf_oracle(st, theta, i, j)
                err["tpcf_vs_oracle"] = max(err["tpcf_vs_oracle"], np.max(np.abs(a - b)))
                c = tpcf_gcs(st, theta, j, i)
                err["tpcf_conjugate_symmetry"] = max(
                    err["tpcf_conjugate_symmetry"], np.max(np.abs(a - np.conj(c))))

    conv = 0.0
    for _ in range(8):
        a = ScaledPolynomial(rng.normal(size=65) + 1j * rng.normal(size=65))
        b = ScaledPolynomial(rng.normal(size=65) + 1j * rng.normal(size=65))
        d = convolve(a, b, 128, backend="direct").to_array()
        f = convolve(a, b, 128, backend="fft").to_array()
        conv = max(conv, float(np.max(np.abs(d - f)) / np.max(np.abs(d))))

    gid = 0.0
    x = rng.random(64)
    th = rng.uniform(-2 * pi, 2 * pi, 64)
    lam = rng.uniform(0.0, 5.0, 64)
    Ms = rng.integers(1, 51, 64)
    for k in range(64):
        g = G_of_x(x[k], th[k], lam[k], int(Ms[k]))
        c = cross_corr_single(np.sqrt(lam[k]) * np.exp(-2j * pi * x[k]), np.sqrt(lam[k]), th[k]) ** int(Ms[k])
        gid = max(gid, abs(g - c))

    dft = 0.0
    for S, M in ((4, 2), (7, 3)):
        mm = homogeneous_mmgs(S / M, M)

        prov = DeepLatticeProvider(mm)
        base = XGrid.minimal(S, M, S / M)
        a1 = fourier_autocorr_exact(S, mm, prov, base, theta)
        a2 = fourier_autocorr_exact(S, mm, prov, XGrid(2 * base.N_x), theta)
        dft = max(dft, float(np.max(np.abs(a1 - a2))))

    S_bh, M_bh = min(S_max, 4), min(M_max, 3)
    mm = homogeneous_mmgs(S_bh / M_bh, M_bh)
    rt = 0.0
    for J in (0.0, 0.3, 1.0):
        model = BoseHubbardModel(1.0, J, M_bh)
        got = fourier_autocorr_exact(S_bh, mm, AssembledProvider(mm, model),
                                     XGrid.minimal(S_bh, M_bh, S_bh / M_bh), theta)
        ref = sector_autocorr(gcs_from_mmgs(mm, S_bh)[0], model, theta).values
        rt = max(rt, float(np.max(np.abs(got - ref))))

    return [
        CheckResult("genfun_vs_enumeration", float(err["genfun_vs_enumeration"]), 1e-10),
        CheckResult("oracle_vs_enumeration", float(err["oracle_vs_enumeration"]), 1e-12),
        CheckResult("tpcf_vs_oracle", float(err["tpcf_vs_oracle"]), 1e-12),
        CheckResult("tpcf_conjugate_symmetry", float(err["tpcf_conjugate_symmetry"]), 1e-12),
        CheckResult("unitarity", float(err["unitarity"]), 1e-9),
        CheckResult("initial_value", float(err["initial_value"]), 1e-12),
        CheckResult("time_reversal", float(err["time_reversal"]), 1e-12),
        CheckResult("convolution_backends", conv, 1e-10),
        CheckResult("G_cross_corr_identity", float(gid), 1e-12),
        CheckResult("dft_doubling", dft, 1e-10),
        CheckResult("bose_hubbard_round_trip", rt, 1e-9),
    ]
