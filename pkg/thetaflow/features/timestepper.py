"""
ThetaFlow – θ-Scheme Time Stepper
==================================
Advances cell averages by one step of

    v^{n+1} + θ·dt·D v^{n+1} = v^n − (1−θ)·dt·D v^n

on the periodic grid.  D is circulant, so the update is diagonal in the DFT
basis: each coefficient is multiplied by the amplification factor at its
frequency.  DFT index k pairs with ξ = (J − k)/J because the DFT uses
e^{−2πijk/J} while the amplification factor is defined for e^{+2iπjξ}.

``direct_step`` solves the same update with a dense cyclic matrix and is
kept as an oracle for small grids.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as spl
from loguru import logger

from thetaflow.config import settings
from thetaflow.core.exceptions import BlowUpError, SingularSymbolError
from thetaflow.core.grid import FieldState, GridSpec, l2_discrete_norm
from thetaflow.features.stencil import SchemeSpec, build_stencil
from thetaflow.features.vonneumann import amplification_factors


# ─────────────────────────────────────────────────────────────────────────────
# Data Classes
# ─────────────────────────────────────────────────────────────────────────────
@dataclass(frozen=True, eq=False)
class StepOperator:
    """Precomputed per-mode multipliers for one scheme on one grid."""

    scheme:             SchemeSpec
    grid:               GridSpec
    fourier_multipliers: np.ndarray

    def __post_init__(self) -> None:
        if self.fourier_multipliers.shape != (self.grid.cell_count,):
            raise ValueError(
                f"expected {self.grid.cell_count} multipliers, got {self.fourier_multipliers.shape}"
            )
        self.fourier_multipliers.setflags(write=False)


def grid_frequencies(grid: GridSpec) -> np.ndarray:
    """ξ paired with each DFT index: (J − k) mod J, divided by J."""
    k = np.arange(grid.cell_count)
    return ((-k) % grid.cell_count) / grid.cell_count


def build_step_operator(scheme: SchemeSpec, grid: GridSpec) -> StepOperator:
    """Multipliers A(ξ_k) for every DFT index; singular frequencies raise with their index."""
    xi = grid_frequencies(grid)
    try:
        multipliers = amplification_factors(scheme, grid.dt, grid.dx, xi)
    except SingularSymbolError as exc:
        logger.error("❌ Step operator | {} | J={} | {}", scheme.label, grid.cell_count, exc)
        raise
    multipliers = np.asarray(multipliers, dtype=complex).copy()
    multipliers[0] = 1.0
    return StepOperator(scheme=scheme, grid=grid, fourier_multipliers=multipliers)


# ─────────────────────────────────────────────────────────────────────────────
# Stepping
# ─────────────────────────────────────────────────────────────────────────────
def _advance(op: StepOperator, values: np.ndarray, step_number: int) -> np.ndarray:
    advanced = np.fft.ifft(op.fourier_multipliers * np.fft.fft(values)).real
    if not np.all(np.isfinite(advanced)):
        raise BlowUpError(step_number, "non-finite values")
    return advanced


def step(op: StepOperator, state: FieldState) -> FieldState:
    """One θ-scheme step; the time index advances by one."""
    state.conforms_to(op.grid)
    n = state.time_index + 1
    return FieldState(_advance(op, state.values, n), n)


def evolve(
    op: StepOperator,
    initial: FieldState,
    n_steps: int,
    blowup_factor: Optional[float] = None,
) -> FieldState:
    """
    Apply ``step`` n_steps times.

    Raises BlowUpError when the field turns non-finite or its norm exceeds
    ``blowup_factor`` times the initial norm.
    """
    if n_steps < 0:
        raise ValueError(f"n_steps must be ≥ 0, got {n_steps}")
    if n_steps > settings.max_steps:
        raise ValueError(f"n_steps={n_steps} exceeds max_steps={settings.max_steps}")
    initial.conforms_to(op.grid)
    factor = settings.blowup_factor if blowup_factor is None else blowup_factor

    values = initial.values
    norm0 = l2_discrete_norm(initial, op.grid)
    ceiling = factor * norm0
    for i in range(1, n_steps + 1):
        n = initial.time_index + i
        values = _advance(op, values, n)
        if norm0 > 0.0:
            norm = float(np.sqrt(op.grid.dx * np.dot(values, values)))
            if norm > ceiling:
                logger.warning(
                    "💥 Blow-up | {} | J={} | step {} | norm {:.3e} > {:.1e}×initial",
                    op.scheme.label, op.grid.cell_count, n, norm, factor,
                )
                raise BlowUpError(n, f"norm grew beyond {factor:.0e}× the initial norm")
    return FieldState(values, initial.time_index + n_steps)


# ─────────────────────────────────────────────────────────────────────────────
# Dense oracle
# ─────────────────────────────────────────────────────────────────────────────
def difference_matrix(scheme: SchemeSpec, grid: GridSpec) -> np.ndarray:
    """Dense cyclic matrix of D (already divided by dx^(2p+1))."""
    J = grid.cell_count
    stencil = build_stencil(scheme)
    matrix = np.zeros((J, J))
    rows = np.arange(J)
    for offset, weight in zip(stencil.offsets, stencil.weights):
        matrix[rows, (rows + offset) % J] += weight
    return matrix / grid.dx ** scheme.order


def direct_step(scheme: SchemeSpec, grid: GridSpec, state: FieldState) -> FieldState:
    """Solve (I + θ·dt·D) v^{n+1} = (I − (1−θ)·dt·D) v^n with a dense solver."""
    state.conforms_to(grid)
    D = difference_matrix(scheme, grid)
    identity = np.eye(grid.cell_count)
    lhs = identity + scheme.theta * grid.dt * D
    rhs = (identity - (1.0 - scheme.theta) * grid.dt * D) @ state.values
    return FieldState(spl.solve(lhs, rhs), state.time_index + 1)


def scheme_residual(scheme: SchemeSpec, grid: GridSpec, before: FieldState, after: FieldState) -> float:
    """ℓ²_Δ norm of the update's residual, for checking implicit steps."""
    D = difference_matrix(scheme, grid)
    residual = (
        after.values + scheme.theta * grid.dt * (D @ after.values)
        - before.values + (1.0 - scheme.theta) * grid.dt * (D @ before.values)
    )
    return l2_discrete_norm(residual, grid)
