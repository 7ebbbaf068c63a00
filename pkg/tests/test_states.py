import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import poisson

from kerrquench.errors import DimensionOverflowError
from kerrquench.states import (
    BoseHubbardModel,
    GcsState,
    KerrLattice,
    MmgsState,
    TimeGrid,
    gcs_from_mmgs,
    hilbert_dim,
    homogeneous_gcs,
    homogeneous_mmgs,
)


def test_homogeneous_gcs_two_sites():
    s = homogeneous_gcs(2, 2)
    np.testing.assert_allclose(s.xi, [1 / math.sqrt(2)] * 2, rtol=0, atol=1e-15)
    assert s.M == 2 and s.S == 2


def test_homogeneous_gcs_hundred_sites():
    np.testing.assert_allclose(homogeneous_gcs(100, 100).xi, 0.1, atol=1e-15)


def test_vacuum_sector_is_allowed():
    s = homogeneous_gcs(0, 3)
    np.testing.assert_allclose(s.xi, 1 / math.sqrt(3))


def test_zero_sites_rejected():
    with pytest.raises(ValueError):
        homogeneous_gcs(2, 0)


def test_gcs_rejects_unnormalized_and_negative_S():
    with pytest.raises(ValueError):
        GcsState(2, [1.0, 1.0])
    with pytest.raises(ValueError):
        GcsState(-1, [1.0])
    with pytest.raises(ValueError):
        GcsState.normalized(3, [0.0, 0.0])


def test_gcs_is_immutable():
    s = homogeneous_gcs(3, 2)
    with pytest.raises(ValueError):
        s.xi[0] = 1.0


def test_homogeneous_mmgs_values():
    s = homogeneous_mmgs(1.0, 50)
    assert np.all(s.alpha == 1.0) and s.ntilde == pytest.approx(50.0, abs=1e-12)
    cat = homogeneous_mmgs(100 / 3, 3)
    assert cat.alpha[0].real == pytest.approx(5.7735, abs=1e-4)
    assert cat.ntilde == pytest.approx(100.0, abs=1e-12)
    assert homogeneous_mmgs(0.0, 2).ntilde == 0.0
    with pytest.raises(ValueError):
        homogeneous_mmgs(-0.1, 2)


def test_mmgs_ntilde_matches_alpha():
    s = MmgsState([1 + 1j, 0.5, -2j])
    assert abs(s.ntilde - np.sum(np.abs(s.alpha) ** 2)) < 1e-12


def test_gcs_from_mmgs_direction_and_weights():
    g, _ = gcs_from_mmgs(MmgsState([1.0, 1.0]), 7)
    np.testing.assert_allclose(g.xi, [1 / math.sqrt(2)] * 2)
    _, w = gcs_from_mmgs(MmgsState([1.0]), 0)
    assert w == pytest.approx(math.exp(-1), rel=1e-14)
    _, w = gcs_from_mmgs(homogeneous_mmgs(1.0, 100), 100)
    assert w == pytest.approx(poisson.pmf(100, 100), rel=1e-12)
    assert round(w, 6) == 0.039861


def test_gcs_from_vacuum_mmgs():
    with pytest.raises(ValueError):
        gcs_from_mmgs(homogeneous_mmgs(0.0, 2), 1)
    _, w = gcs_from_mmgs(homogeneous_mmgs(0.0, 2), 0)
    assert w == 1.0


def test_poisson_weights_sum_to_one():
    st_ = homogeneous_mmgs(2.5, 4)
    total = sum(gcs_from_mmgs(st_, S)[1] for S in range(0, 60))
    assert total == pytest.approx(1.0, abs=1e-13)
    assert 1.0 - total <= poisson.sf(59, 10.0) + 1e-15


def test_hilbert_dim_examples():
    assert hilbert_dim(2, 2) == 3
    assert hilbert_dim(100, 3) == 5151
    assert hilbert_dim(0, 5) == 1


def test_hilbert_dim_errors_are_distinct():
    with pytest.raises(DimensionOverflowError):
        hilbert_dim(100, 100)
    with pytest.raises(OverflowError):
        hilbert_dim(30, 30, limit=10**6)
    with pytest.raises(ValueError):
        hilbert_dim(-1, 2)
    with pytest.raises(ValueError):
        hilbert_dim(2, 0)
    assert not issubclass(DimensionOverflowError, ValueError)
    assert hilbert_dim(100, 100, limit=None) == math.comb(199, 99)


@given(st.integers(1, 40), st.integers(2, 40))
def test_hilbert_dim_pascal(S, M):
    assert hilbert_dim(S, M, limit=None) == hilbert_dim(S - 1, M, limit=None) + hilbert_dim(S, M - 1, limit=None)


@settings(max_examples=50)
@given(st.integers(0, 50), st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False,
                                                        allow_infinity=False), min_size=1, max_size=12))
def test_normalized_constructor_invariant(S, xi):
    if np.sum(np.abs(np.asarray(xi)) ** 2) < 1e-6:
        return
    s = GcsState.normalized(S, xi)
    assert abs(np.sum(np.abs(s.xi) ** 2) - 1.0) < 1e-12


def test_models_and_grid_validation():
    with pytest.raises(ValueError):
        KerrLattice(0.0, 3)
    with pytest.raises(ValueError):
        KerrLattice(1.0, 0)
    with pytest.raises(ValueError):
        BoseHubbardModel(1.0, -0.1, 3)
    with pytest.raises(ValueError):
        BoseHubbardModel(1.0, 0.1, 3, "twisted")
    assert BoseHubbardModel(1.0, 1.0, 2).bonds() == [(0, 1)]
    assert BoseHubbardModel(1.0, 1.0, 4).bonds() == [(0, 1), (0, 3), (1, 2), (2, 3)]
    assert BoseHubbardModel(1.0, 1.0, 4, "open").bonds() == [(0, 1), (1, 2), (2, 3)]
    g = TimeGrid.uniform(0, 1, 11)
    assert g.count == 11 and g.spacing == pytest.approx(0.1)
    with pytest.raises(ValueError):
        TimeGrid([])
    with pytest.raises(ValueError):
        TimeGrid([0.0, 0.0])
