"""
tests/test_initial_data.py
===========================
Initial data families, exact cell-average projection, discrete Sobolev norms
and the Fourier mollifier.

Run with:
    pytest thetaflow/tests/ -v
"""

import math

import numpy as np
import pytest
from scipy.special import erf

from thetaflow.core.grid import FieldState, GridSpec, l2_discrete_norm
from thetaflow.features.analysis import fit_slope
from thetaflow.features.initial_data import (
    CutoffProfile,
    DatumKind,
    InitialDatum,
    Mollifier,
    cell_average_projection,
    cutoff,
    mollify,
    sobolev_norm,
)


# ─────────────────────────────────────────────────────────────────────────────
# Fixtures
# ─────────────────────────────────────────────────────────────────────────────

@pytest.fixture
def unit_cells():
    return GridSpec(50.0, 50, 0.1, 1.0)


@pytest.fixture(scope="module")
def fine_grid():
    return GridSpec(50.0, 16384, 0.001, 0.1)


# ─────────────────────────────────────────────────────────────────────────────
# Datum construction
# ─────────────────────────────────────────────────────────────────────────────

def test_regularity_of_each_family():
    assert InitialDatum.indicator_integrated(1).regularity == 1.5
    assert InitialDatum.indicator_integrated(2).regularity == 2.5
    assert InitialDatum.fourier_synthetic(1.2).regularity == 1.2
    assert InitialDatum.gaussian().regularity == math.inf
    assert InitialDatum.single_mode(3).regularity == math.inf


@pytest.mark.parametrize(
    "factory",
    [
        lambda: InitialDatum.indicator_integrated(-1),
        lambda: InitialDatum.indicator_integrated(1, (25.0, 20.0)),
        lambda: InitialDatum.fourier_synthetic(0.0),
        lambda: InitialDatum.gaussian(width=0.0),
    ],
)
def test_invalid_datum_rejected(factory):
    with pytest.raises(ValueError):
        factory()


def test_scaled_keeps_kind():
    datum = InitialDatum.gaussian(10.0, 1.0).scaled(3.0)
    assert datum.kind is DatumKind.GAUSSIAN
    assert datum.amplitude == 3.0


# ─────────────────────────────────────────────────────────────────────────────
# Projection
# ─────────────────────────────────────────────────────────────────────────────

def test_indicator_projection_is_exact(unit_cells):
    """Cells 20..24 lie inside (20, 25) and average to one."""
    values = cell_average_projection(InitialDatum.indicator_integrated(0), unit_cells).values
    expected = np.zeros(50)
    expected[20:25] = 1.0
    np.testing.assert_allclose(values, expected, atol=1e-12)


def test_indicator_straddling_cells(unit_cells):
    values = cell_average_projection(
        InitialDatum.indicator_integrated(0, (20.5, 22.25)), unit_cells
    ).values
    assert values[20] == pytest.approx(0.5)
    assert values[21] == pytest.approx(1.0)
    assert values[22] == pytest.approx(0.25)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_integrated_indicator_is_mean_free_and_periodic(k):
    grid = GridSpec(50.0, 2000, 0.01, 0.1)
    values = cell_average_projection(InitialDatum.indicator_integrated(k), grid).values
    assert abs(values.mean()) <= 1e-10 * np.max(np.abs(values))
    # continuous across the domain edge: neighbouring cells differ by O(dx)
    assert abs(values[0] - values[-1]) <= 5 * np.max(np.abs(np.diff(values)))


def test_gaussian_mass(fine_grid):
    """Σ dx·v_j = w·√(2π) for a well-contained bump."""
    state = cell_average_projection(InitialDatum.gaussian(25.0, 1.0), fine_grid)
    assert np.sum(state.values) * fine_grid.dx == pytest.approx(math.sqrt(2 * math.pi), rel=1e-10)
    assert state.values.max() == pytest.approx(1.0, rel=1e-4)


def test_gaussian_wraps_periodically():
    grid = GridSpec(20.0, 400, 0.01, 0.1)
    state = cell_average_projection(InitialDatum.gaussian(0.0, 1.0), grid)
    assert state.values[0] == pytest.approx(state.values[-1], rel=1e-12)


def test_gaussian_averages_match_erf_integrals():
    """The Fourier-series projection equals the erf cell integrals over nearby images."""
    L, J, center, width = 20.0, 400, 7.3, 1.1
    grid = GridSpec(L, J, 0.01, 0.1)
    state = cell_average_projection(InitialDatum.gaussian(center, width), grid)
    edges = grid.cell_edges()
    expected = sum(
        np.diff(erf((edges - center - image) / (math.sqrt(2.0) * width))) for image in (-L, 0.0, L)
    ) * width * math.sqrt(math.pi / 2.0) / grid.dx
    np.testing.assert_allclose(state.values, expected, atol=1e-12)


def test_single_mode_cell_averages():
    """Cell average of cos(x + φ) is sinc(1/J)·cos(x_{j+1/2} + φ)."""
    J = 64
    grid = GridSpec(2 * np.pi, J, 0.01, 0.1)
    state = cell_average_projection(InitialDatum.single_mode(1, amplitude=2.0, phase=0.3), grid)
    centers = (np.arange(J) + 0.5) * grid.dx
    np.testing.assert_allclose(state.values, 2.0 * np.sinc(1 / J) * np.cos(centers + 0.3), atol=1e-12)


def test_fourier_synthetic_is_seeded():
    grid = GridSpec(50.0, 512, 0.01, 0.1)
    a = cell_average_projection(InitialDatum.fourier_synthetic(1.5, seed=4, mode_cap=4096), grid)
    b = cell_average_projection(InitialDatum.fourier_synthetic(1.5, seed=4, mode_cap=4096), grid)
    c = cell_average_projection(InitialDatum.fourier_synthetic(1.5, seed=5, mode_cap=4096), grid)
    np.testing.assert_array_equal(a.values, b.values)
    assert not np.allclose(a.values, c.values)
    assert abs(a.values.mean()) < 1e-12


# ─────────────────────────────────────────────────────────────────────────────
# Sobolev norms
# ─────────────────────────────────────────────────────────────────────────────

def test_sobolev_zero_is_l2(fine_grid):
    state = cell_average_projection(InitialDatum.gaussian(25.0, 1.0), fine_grid)
    assert sobolev_norm(state, fine_grid, 0.0) == pytest.approx(l2_discrete_norm(state, fine_grid), rel=1e-12)


def test_sobolev_rejects_negative_index(unit_cells):
    with pytest.raises(ValueError):
        sobolev_norm(FieldState(np.zeros(50)), unit_cells, -1.0)


def test_synthetic_data_sits_at_its_regularity():
    """The H^m norm settles under refinement while H^{m+1/2} keeps growing."""
    m = 1.5
    datum = InitialDatum.fourier_synthetic(m, seed=3)
    norms = {}
    for J in (4096, 8192):
        grid = GridSpec(2 * np.pi, J, 0.01, 0.1)
        state = cell_average_projection(datum, grid)
        norms[J] = (sobolev_norm(state, grid, m), sobolev_norm(state, grid, m + 0.5))
    assert norms[8192][0] / norms[4096][0] < 1.05
    assert norms[8192][1] / norms[4096][1] > 1.20


# ─────────────────────────────────────────────────────────────────────────────
# Mollifier
# ─────────────────────────────────────────────────────────────────────────────

@pytest.mark.parametrize("profile", list(CutoffProfile))
def test_cutoff_shape(profile):
    x = np.array([0.0, 0.25, 0.5, 0.75, 1.0, 2.0, -0.75])
    chi = cutoff(x, profile)
    assert chi[0] == chi[1] == chi[2] == 1.0
    assert chi[4] == chi[5] == 0.0
    assert 0.0 < chi[3] < 1.0
    assert chi[6] == chi[3]
    grid = np.linspace(0.5, 1.0, 200)
    assert np.all(np.diff(cutoff(grid, profile)) <= 1e-15)


def test_mollifier_rejects_bad_width():
    with pytest.raises(ValueError):
        Mollifier(0.0)


@pytest.mark.parametrize("k, expected", [(1, 1.5), (2, 2.5)])
def test_mollifier_approximation_rate(fine_grid, k, expected):
    """‖u − u⋆φ^δ‖ decays like δ^m for u in H^m."""
    state = cell_average_projection(InitialDatum.indicator_integrated(k), fine_grid)
    deltas = [2.0**-i for i in range(3, 9)]
    errors = [
        l2_discrete_norm(state.values - mollify(state, fine_grid, Mollifier(d)).values, fine_grid)
        for d in deltas
    ]
    assert fit_slope(deltas, errors) == pytest.approx(expected, abs=0.2)


@pytest.mark.parametrize("k, s, expected", [(0, 2.0, 1.5), (1, 4.0, 2.5)])
def test_mollified_norm_growth(fine_grid, k, s, expected):
    """‖u⋆φ^δ‖_{H^s} grows like δ^{m−s} for s > m."""
    state = cell_average_projection(InitialDatum.indicator_integrated(k), fine_grid)
    deltas = [2.0**-i for i in range(3, 8)]
    norms = [sobolev_norm(mollify(state, fine_grid, Mollifier(d)), fine_grid, s) for d in deltas]
    assert -fit_slope(deltas, norms) == pytest.approx(expected, abs=0.25)
