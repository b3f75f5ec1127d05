"""
ThetaFlow – Periodic Grid
==========================
Grid bookkeeping for the periodic torus [0, L): cell size, time step and
horizon, the cell-average field container, the ℓ²_Δ norm and the discrete
Fourier transform every other module builds on.

DFT convention (numpy):  û_k = Σ_j v_j e^{-2πijk/J},  inverse carries 1/J.
Parseval therefore reads  Σ dx·v_j² = (dx/J)·Σ |û_k|².
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from thetaflow.core.exceptions import GridMismatchError, NonFiniteFieldError

# ─────────────────────────────────────────────────────────────────────────────
# Constants
# ─────────────────────────────────────────────────────────────────────────────
MIN_CELLS = 4
STEP_ROUNDING_GUARD = 1e-9     # keeps floor(T/dt) from losing a step to rounding


# ─────────────────────────────────────────────────────────────────────────────
# Data Classes
# ─────────────────────────────────────────────────────────────────────────────
@dataclass(frozen=True)
class GridSpec:
    """Periodic spatial grid plus time step and horizon."""

    domain_length: float       # L, length units
    cell_count:    int         # J ≥ 4
    dt:            float       # time step
    horizon:       float       # final time T

    def __post_init__(self) -> None:
        if not (self.domain_length > 0 and math.isfinite(self.domain_length)):
            raise ValueError(f"domain_length must be positive, got {self.domain_length}")
        if self.cell_count < MIN_CELLS:
            raise ValueError(f"cell_count must be ≥ {MIN_CELLS}, got {self.cell_count}")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not (self.horizon > 0 and math.isfinite(self.horizon)):
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        if self.step_count < 1:
            raise ValueError(f"horizon {self.horizon} shorter than one step dt={self.dt}")

    @classmethod
    def coupled(
        cls,
        domain_length: float,
        cell_count: int,
        horizon: float,
        alpha: float = 1.0,
    ) -> "GridSpec":
        """
        Grid with dt ≈ dx^α, snapped to T/N so the last step lands on T.

        N = ceil(T / dx^α), dt = T / N.
        """
        dx = domain_length / cell_count
        nominal = dx ** alpha
        if nominal <= 0.0:
            raise ValueError(f"dx^alpha underflows for dx={dx}, alpha={alpha}")
        n_steps = max(1, math.ceil(horizon / nominal - STEP_ROUNDING_GUARD))
        return cls(domain_length, cell_count, horizon / n_steps, horizon)

    @property
    def dx(self) -> float:
        return self.domain_length / self.cell_count

    @property
    def step_count(self) -> int:
        """N = floor(T / dt)."""
        return int(math.floor(self.horizon / self.dt + STEP_ROUNDING_GUARD))

    def time(self, n: int) -> float:
        """tⁿ = n·dt."""
        return n * self.dt

    def cell_edges(self) -> np.ndarray:
        """Left edges x_j = j·dx, plus the right edge L (J + 1 values)."""
        return np.arange(self.cell_count + 1) * self.dx

    def signed_modes(self) -> np.ndarray:
        """Signed integer frequencies k̃ in (−J/2, J/2], indexed like the DFT."""
        k = np.arange(self.cell_count)
        return np.where(k > self.cell_count // 2, k - self.cell_count, k)

    def wavenumbers(self) -> np.ndarray:
        """Angular frequencies ξ_k = 2π k̃ / L."""
        return 2.0 * np.pi * self.signed_modes() / self.domain_length

    def with_cells(self, cell_count: int, dt: float | None = None) -> "GridSpec":
        return GridSpec(self.domain_length, cell_count, self.dt if dt is None else dt, self.horizon)

    def to_dict(self) -> dict:
        return {
            "domain_length": self.domain_length,
            "cell_count": self.cell_count,
            "dx": self.dx,
            "dt": self.dt,
            "horizon": self.horizon,
            "step_count": self.step_count,
        }


@dataclass(frozen=True, eq=False)
class FieldState:
    """Cell averages v_j at time level n.  Values are copied and frozen."""

    values:     np.ndarray
    time_index: int = 0

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float, copy=True)
        if arr.ndim != 1:
            raise ValueError(f"field must be one-dimensional, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteFieldError()
        if self.time_index < 0:
            raise ValueError(f"time_index must be ≥ 0, got {self.time_index}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @classmethod
    def zeros(cls, grid: GridSpec) -> "FieldState":
        return cls(np.zeros(grid.cell_count))

    @property
    def cell_count(self) -> int:
        return int(self.values.shape[0])

    def conforms_to(self, grid: GridSpec) -> None:
        if self.cell_count != grid.cell_count:
            raise GridMismatchError(
                f"field has {self.cell_count} cells, grid expects {grid.cell_count}"
            )


# ─────────────────────────────────────────────────────────────────────────────
# Norms & transforms
# ─────────────────────────────────────────────────────────────────────────────
def _values(state: FieldState | Sequence[float] | np.ndarray) -> np.ndarray:
    values = state.values if isinstance(state, FieldState) else np.asarray(state, dtype=float)
    if not np.all(np.isfinite(values)):
        raise NonFiniteFieldError()
    return values


def l2_discrete_norm(state: FieldState | np.ndarray, grid: GridSpec) -> float:
    """ℓ²_Δ norm  sqrt(Σ_j dx·v_j²)."""
    values = _values(state)
    if values.shape[0] != grid.cell_count:
        raise GridMismatchError(f"field has {values.shape[0]} cells, grid expects {grid.cell_count}")
    return float(np.sqrt(grid.dx * np.dot(values, values)))


def dft(state: FieldState | np.ndarray) -> np.ndarray:
    """Unnormalized forward transform û_k = Σ_j v_j e^{-2πijk/J}."""
    return np.fft.fft(_values(state))


def inverse_dft(coefficients: np.ndarray) -> np.ndarray:
    """Inverse of :func:`dft`; the imaginary residue of a real field is discarded."""
    return np.fft.ifft(coefficients).real


def parseval_check(state: FieldState, grid: GridSpec) -> float:
    """|‖v‖² − (dx/J)·Σ|û_k|²|, which stays ≤ 1e-10·‖v‖² in double precision."""
    coefficients = dft(state)
    spectral = grid.dx / grid.cell_count * float(np.sum(np.abs(coefficients) ** 2))
    return abs(l2_discrete_norm(state, grid) ** 2 - spectral)
