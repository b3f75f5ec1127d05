"""
tests/test_grid.py
===================
Unit tests for the periodic grid, field container, norm and DFT helpers.

Run with:
    pytest thetaflow/tests/ -v
"""

import numpy as np
import pytest

from thetaflow.core.exceptions import GridMismatchError, NonFiniteFieldError
from thetaflow.core.grid import (
    FieldState,
    GridSpec,
    dft,
    inverse_dft,
    l2_discrete_norm,
    parseval_check,
)


# ─────────────────────────────────────────────────────────────────────────────
# Fixtures
# ─────────────────────────────────────────────────────────────────────────────

@pytest.fixture
def grid():
    return GridSpec(domain_length=50.0, cell_count=800, dt=0.05, horizon=0.1)


@pytest.fixture
def random_field():
    return FieldState(np.random.default_rng(1).standard_normal(800))


# ─────────────────────────────────────────────────────────────────────────────
# GridSpec
# ─────────────────────────────────────────────────────────────────────────────

def test_grid_basic_quantities(grid):
    """dx = L/J and N = T/dt."""
    assert grid.dx == pytest.approx(0.0625)
    assert grid.step_count == 2
    assert grid.time(2) == pytest.approx(0.1)


def test_coupled_grid_lands_on_horizon():
    """dt is snapped to T/N so the last step ends exactly at T."""
    grid = GridSpec.coupled(50.0, 800, 0.1, alpha=1.0)
    assert grid.step_count == 2
    assert grid.dt == pytest.approx(0.05)
    assert grid.time(grid.step_count) == pytest.approx(0.1, abs=1e-15)

    fine = GridSpec.coupled(50.0, 3000, 0.1, alpha=1.0)
    assert fine.dt <= fine.dx
    assert fine.time(fine.step_count) == pytest.approx(0.1, abs=1e-15)


def test_coupled_grid_with_higher_alpha():
    """dt ≈ dx^α, never larger."""
    grid = GridSpec.coupled(50.0, 128, 10.0, alpha=5.0)
    assert grid.dt <= grid.dx ** 5
    assert grid.dt > 0.99 * grid.dx ** 5


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(domain_length=50.0, cell_count=3, dt=0.1, horizon=1.0),
        dict(domain_length=-1.0, cell_count=8, dt=0.1, horizon=1.0),
        dict(domain_length=50.0, cell_count=8, dt=0.0, horizon=1.0),
        dict(domain_length=50.0, cell_count=8, dt=2.0, horizon=1.0),
    ],
)
def test_invalid_grid_rejected(kwargs):
    """Too few cells, non-positive sizes, or T < dt are input errors."""
    with pytest.raises(ValueError):
        GridSpec(**kwargs)


def test_signed_modes_even_and_odd():
    even = GridSpec(8.0, 8, 0.1, 1.0)
    odd = GridSpec(7.0, 7, 0.1, 1.0)
    assert even.signed_modes().tolist() == [0, 1, 2, 3, 4, -3, -2, -1]
    assert odd.signed_modes().tolist() == [0, 1, 2, 3, -3, -2, -1]


def test_wavenumbers_scale_with_domain():
    grid = GridSpec(2 * np.pi, 8, 0.1, 1.0)
    np.testing.assert_allclose(grid.wavenumbers(), grid.signed_modes())


# ─────────────────────────────────────────────────────────────────────────────
# FieldState
# ─────────────────────────────────────────────────────────────────────────────

def test_field_state_rejects_non_finite():
    with pytest.raises(NonFiniteFieldError, match="non-finite field"):
        FieldState(np.array([0.0, np.nan, 1.0, 2.0]))


def test_field_state_is_read_only():
    """Values are copied and frozen."""
    source = np.ones(4)
    state = FieldState(source)
    source[0] = 5.0
    assert state.values[0] == 1.0
    with pytest.raises(ValueError):
        state.values[0] = 2.0


def test_field_state_conformance(grid):
    with pytest.raises(GridMismatchError):
        FieldState(np.zeros(10)).conforms_to(grid)


# ─────────────────────────────────────────────────────────────────────────────
# Norm & transforms
# ─────────────────────────────────────────────────────────────────────────────

def test_l2_norm_of_constant(grid):
    """‖1‖ = sqrt(L)."""
    assert l2_discrete_norm(FieldState(np.ones(800)), grid) == pytest.approx(np.sqrt(50.0))


def test_l2_norm_grid_mismatch(grid):
    with pytest.raises(GridMismatchError):
        l2_discrete_norm(np.ones(10), grid)


def test_parseval(grid, random_field):
    norm_sq = l2_discrete_norm(random_field, grid) ** 2
    assert parseval_check(random_field, grid) <= 1e-10 * norm_sq


def test_inverse_dft_round_trip(random_field):
    np.testing.assert_allclose(inverse_dft(dft(random_field)), random_field.values, atol=1e-12)


def test_l2_norm_is_homogeneous(grid, random_field):
    norm = l2_discrete_norm(random_field, grid)
    for a in (-3.0, 0.0, 0.5, 1e6):
        assert l2_discrete_norm(FieldState(a * random_field.values), grid) == pytest.approx(abs(a) * norm)


def test_dft_of_constant_and_impulse():
    J = 16
    constant = dft(FieldState(np.full(J, 2.5)))
    assert constant[0] == pytest.approx(J * 2.5)
    np.testing.assert_allclose(constant[1:], 0.0, atol=1e-12)

    impulse = np.zeros(J)
    impulse[0] = 1.0
    np.testing.assert_allclose(dft(FieldState(impulse)), np.ones(J), atol=1e-15)


def test_dft_of_cosine_on_eight_cells():
    """cos(2πj/8) puts J/2 = 4 in bins 1 and 7 and nothing elsewhere."""
    coeffs = dft(FieldState(np.cos(2 * np.pi * np.arange(8) / 8)))
    assert coeffs[1] == pytest.approx(4.0)
    assert coeffs[7] == pytest.approx(4.0)
    np.testing.assert_allclose(np.delete(coeffs, [1, 7]), 0.0, atol=1e-12)


@pytest.mark.parametrize("J", [4, 5, 16, 63, 64, 1000, 4096])
def test_dft_round_trip_sizes(J):
    values = np.random.default_rng(J).standard_normal(J)
    np.testing.assert_allclose(inverse_dft(dft(FieldState(values))), values, atol=1e-12)
