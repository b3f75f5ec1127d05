"""
ThetaFlow – Exact References
=============================
Exact evolution of ∂ₜu + ∂ₓ^(2p+1)u = 0 on the torus and the cell-average
coarsening used to compare a J-cell run with its 2J-cell partner.

Each resolved mode is multiplied by exp(−i(−1)^p ξ_k^(2p+1) t).  The Nyquist
coefficient of an even grid is left unchanged: it is self-conjugate for
real fields, so no unit-modulus complex factor keeps it real.
"""

from __future__ import annotations

import numpy as np

from thetaflow.core.grid import FieldState, GridSpec, dft, inverse_dft


def exact_phases(grid: GridSpec, p: int, t: float) -> np.ndarray:
    """Phases (−1)^p·ξ_k^(2p+1)·t; zero at the Nyquist index."""
    if t < 0:
        raise ValueError(f"t must be ≥ 0, got {t}")
    xi = grid.wavenumbers()
    sign = -1.0 if p % 2 else 1.0
    phases = sign * xi ** (2 * p + 1) * t
    if grid.cell_count % 2 == 0:
        phases[grid.cell_count // 2] = 0.0
    return phases


def exact_multipliers(grid: GridSpec, p: int, t: float) -> np.ndarray:
    """exp(−(iξ_k)^(2p+1)·t) = exp(−i·phase_k) for every DFT index."""
    return np.exp(-1j * exact_phases(grid, p, t))


def exact_evolve(initial: FieldState, grid: GridSpec, p: int, t: float) -> FieldState:
    """Cell averages of the exact solution at time t."""
    initial.conforms_to(grid)
    if t == 0:
        return FieldState(initial.values, initial.time_index)
    evolved = inverse_dft(dft(initial) * exact_multipliers(grid, p, t))
    return FieldState(evolved, initial.time_index)


def coarsen_by_cell_average(fine: FieldState) -> FieldState:
    """Coarse cell j is the mean of fine cells 2j and 2j+1."""
    if fine.cell_count % 2:
        raise ValueError(f"cannot coarsen an odd cell count ({fine.cell_count})")
    pairs = fine.values.reshape(-1, 2)
    return FieldState(pairs.mean(axis=1), fine.time_index)
