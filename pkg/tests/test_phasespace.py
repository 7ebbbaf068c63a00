import math

import numpy as np
import pytest

from kerrquench.glauber_dynamics import G_of_x
from kerrquench.phasespace import PhaseGridSpec, circle_section, distribution_grid, husimi_norm_check

CAT = math.sqrt(100 / 3)


def test_default_spec():
    spec = PhaseGridSpec.for_alpha(1.5)
    assert spec.n_re == spec.n_im == 201
    assert spec.extent == pytest.approx(5.5)
    assert spec.betas().shape == (201, 201)


def test_peak_at_alpha_initially():
    g = distribution_grid(1.0, 0.0, 50)
    beta, value = g.argmax()
    assert beta == pytest.approx(1.0) and value == pytest.approx(1.0, abs=1e-12)
    assert g.values.min() >= 0 and g.values.max() <= 1


def test_cat_grid_has_two_spots_on_imaginary_axis():
    g = distribution_grid(CAT, math.pi, 3)
    v = g.values
    upper, lower = v[g.im > 0], v[g.im < 0]
    k_up = np.unravel_index(np.argmax(upper), upper.shape)
    k_lo = np.unravel_index(np.argmax(lower), lower.shape)
    assert g.re[k_up[1]] == pytest.approx(0.0, abs=0.1)
    assert g.re[k_lo[1]] == pytest.approx(0.0, abs=0.1)
    assert g.im[g.im > 0][k_up[0]] == pytest.approx(CAT, abs=0.1)
    assert g.im[g.im < 0][k_lo[0]] == pytest.approx(-CAT, abs=0.1)
    assert upper.max() == pytest.approx(0.5 ** 1.5, rel=1e-2)
    # nothing left near the initial position
    k_alpha = (np.argmin(np.abs(g.im)), np.argmin(np.abs(g.re - CAT)))
    assert v[k_alpha] < 1e-6


def test_single_connected_spot_at_low_filling():
    g = distribution_grid(math.sqrt(2 / 3), math.pi, 150)
    mask = g.values > 0.5 * g.values.max()
    from scipy.ndimage import label

    _, count = label(mask)
    assert count == 1


def test_mirror_symmetry_for_real_alpha():
    spec = PhaseGridSpec(4.0, 61, 61)
    a = distribution_grid(1.7, 0.9, 4, spec).values
    b = distribution_grid(1.7, -0.9, 4, spec).values[::-1]
    assert np.max(np.abs(a - b)) < 1e-12


def test_circle_section_matches_G(seeds):
    rng = np.random.default_rng(seeds["circle_section"])
    x = rng.random(256)
    th = rng.uniform(0, 2 * math.pi, 256)
    for lam, M in ((1.0, 50), (2.5, 7)):
        a = circle_section(math.sqrt(lam), th, M, x)
        b = np.abs(G_of_x(x, th, lam, M))
        assert np.max(np.abs(a - b)) < 1e-12
    assert circle_section(1.0, 0.0, 50, 0.0) == pytest.approx(1.0)


def test_circle_section_dips_at_quarter_period():
    x = np.linspace(0, 1, 200, endpoint=False)
    sec = circle_section(1.0, math.pi / 2, 50, x)
    assert sec.max() < 0.5 and sec.min() < 1e-3


@pytest.mark.parametrize("alpha,theta", [(1.0, 0.0), (math.sqrt(3), math.pi), (math.sqrt(3), 0.0), (2.0, 1.1)])
def test_husimi_norm(alpha, theta):
    assert abs(husimi_norm_check(alpha, theta) - 1) < 1e-3


def test_husimi_norm_improves_with_resolution():
    errs = [abs(husimi_norm_check(math.sqrt(3), math.pi, n) - 1) for n in (9, 13, 21)]
    assert errs[0] > errs[1] > errs[2]
