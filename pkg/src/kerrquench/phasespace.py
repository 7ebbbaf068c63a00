"""Phase-space pictures of the Kerr-evolved Glauber state.

The plotted quantity is ``|<beta| e^{-iH t} |alpha>|^M`` over the complex
``beta`` plane, i.e. the single-site overlap raised to the number of sites,
without the ``1/pi`` Husimi normalization.
"""

from dataclasses import dataclass
from math import pi, sqrt

import numpy as np

from .glauber_dynamics import TruncationSpec, cross_corr_single

DEFAULT_RESOLUTION = 201
DEFAULT_MARGIN = 4.0
NORM_MARGIN = 6.0


@dataclass(frozen=True)
class PhaseGridSpec:
    """Square grid ``[-extent, extent]^2`` sampled at ``n_re x n_im`` points."""

    extent: float
    n_re: int = DEFAULT_RESOLUTION
    n_im: int = DEFAULT_RESOLUTION

    def __post_init__(self):
        if not self.extent > 0:
            raise ValueError(f"extent must be positive, got {self.extent!r}")
        if self.n_re < 2 or self.n_im < 2:
            raise ValueError("grid needs at least two points per axis")

    @classmethod
    def for_alpha(cls, alpha, resolution=DEFAULT_RESOLUTION, margin=DEFAULT_MARGIN):
        """Default window ``[-(|alpha| + margin), |alpha| + margin]^2``."""
        return cls(abs(alpha) + margin, resolution, resolution)

    @property
    def re(self):
        return np.linspace(-self.extent, self.extent, self.n_re)

    @property
    def im(self):
        return np.linspace(-self.extent, self.extent, self.n_im)

    def betas(self):
        """Complex ``beta`` values, shape ``(n_im, n_re)``; row k has ``Im beta = im[k]``."""
        return self.re[None, :] + 1j * self.im[:, None]


@dataclass
class PhaseGrid:
    """Distribution values on a ``PhaseGridSpec``, indexed ``[im, re]``."""

    spec: PhaseGridSpec
    values: np.ndarray

    @property
    def re(self):
        return self.spec.re

    @property
    def im(self):
        return self.spec.im

    def argmax(self):
        k = np.unravel_index(np.argmax(self.values), self.values.shape)
        return complex(self.re[k[1]], self.im[k[0]]), float(self.values[k])


def _default_trunc(alpha, bmax):
    return TruncationSpec.for_mean(abs(alpha) * bmax)


def distribution_grid(alpha, theta, M, spec=None, trunc=None):
    """``|<beta| e^{-iH t} |alpha>|^M`` on a grid of ``beta`` values."""
    if int(M) != M or M < 1:
        raise ValueError(f"M must be a positive integer, got {M!r}")
    if spec is None:
        spec = PhaseGridSpec.for_alpha(alpha)
    betas = spec.betas()
    if trunc is None:
        trunc = _default_trunc(alpha, float(np.max(np.abs(betas))))
    c = cross_corr_single(betas, complex(alpha), float(theta), trunc)
    vals = np.abs(c) ** int(M)
    return PhaseGrid(spec, np.minimum(vals, 1.0))


def circle_section(radius, theta, M, x, trunc=None):
    """Distribution along ``beta = radius * e^{-2 pi i x}`` with ``alpha = radius``.

    Equals ``|G_of_x(x, theta, radius**2, M)|``.
    """
    x = np.asarray(x, dtype=np.float64)
    beta = radius * np.exp(-2j * pi * x)
    c = cross_corr_single(beta, complex(radius), theta, trunc)
    return np.abs(c) ** int(M)


def husimi_norm_check(alpha, theta, n=DEFAULT_RESOLUTION, margin=NORM_MARGIN, trunc=None):
    """``(1/pi) int |<beta|psi(theta)>|^2 d^2 beta`` by the 2-D midpoint rule.

    The square of half-width ``|alpha| + margin`` is split into ``n x n``
    cells. A value of 1 confirms that the truncated evolution is unitary.
    """
    R = abs(alpha) + margin
    h = 2.0 * R / n
    mid = -R + (np.arange(n) + 0.5) * h
    betas = mid[None, :] + 1j * mid[:, None]
    if trunc is None:
        trunc = _default_trunc(alpha, sqrt(2.0) * R)
    c = cross_corr_single(betas, complex(alpha), float(theta), trunc)
    return float(np.sum(np.abs(c) ** 2) * h * h / pi)
