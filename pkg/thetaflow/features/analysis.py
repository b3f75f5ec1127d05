"""
ThetaFlow – Error Analysis
===========================
Consistency and convergence errors, observed orders and the theoretical
rate table for data in H^m.

Rate table (coupling dt = dx^α)
-------------------------------
  time exponent    θ ≠ 1/2 : min(m, 4p+2) / (4p+2)
                   θ = 1/2 : 2·min(m, 6p+3) / (6p+3)
  space exponent   one-sided : min(m, 2p+2) / (2p+2)
                   central   : 2·min(m, 2p+3) / (2p+3)
  overall          min(α·time, space)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from thetaflow.config import settings
from thetaflow.core.exceptions import BlowUpError, DegenerateErrorValue, GridMismatchError, ParityError
from thetaflow.core.grid import FieldState, GridSpec, dft, inverse_dft, l2_discrete_norm
from thetaflow.features.initial_data import InitialDatum, cell_average_projection, sobolev_norm
from thetaflow.features.reference import exact_evolve, exact_multipliers, exact_phases
from thetaflow.features.stencil import SchemeKind, SchemeSpec
from thetaflow.features.timestepper import StepOperator, step
from thetaflow.features.vonneumann import kind_symbol, unstable_parity

__all__ = [
    "RatePrediction",
    "consistency_error",
    "convergence_error",
    "observed_order",
    "theoretical_order",
    "time_sampled_error",
    "sample_steps",
    "fit_slope",
    "optimal_mollifier_width",
    "sobolev_norm",
]

CRANK_NICOLSON = 0.5
_THETA_TOLERANCE = 1e-12


# ─────────────────────────────────────────────────────────────────────────────
# Data Classes
# ─────────────────────────────────────────────────────────────────────────────
@dataclass(frozen=True)
class RatePrediction:
    time_exponent:                float
    space_exponent:               float
    overall_order_under_coupling: float
    notes:                        str = ""

    def to_dict(self) -> dict:
        return {
            "time_exponent": self.time_exponent,
            "space_exponent": self.space_exponent,
            "overall": self.overall_order_under_coupling,
            "notes": self.notes,
        }


# ─────────────────────────────────────────────────────────────────────────────
# Theoretical rates
# ─────────────────────────────────────────────────────────────────────────────
def _is_crank_nicolson(theta: float) -> bool:
    return abs(theta - CRANK_NICOLSON) <= _THETA_TOLERANCE


def theoretical_order(
    m: float,
    p: int,
    kind: SchemeKind,
    theta: float,
    coupling_alpha: float = 1.0,
) -> RatePrediction:
    """Convergence rate predicted for data in H^m under dt = dx^α."""
    kind = SchemeKind(kind)
    if m < 0:
        raise ValueError(f"m must be ≥ 0, got {m}")
    if unstable_parity(kind, p):
        raise ParityError(kind.value, p)

    if _is_crank_nicolson(theta):
        time_cap = 6 * p + 3
        time_exponent = 2.0 * min(m, time_cap) / time_cap
    else:
        time_cap = 4 * p + 2
        time_exponent = min(m, time_cap) / time_cap

    if kind is SchemeKind.CENTRAL:
        space_cap = 2 * p + 3
        space_exponent = 2.0 * min(m, space_cap) / space_cap
    else:
        space_cap = 2 * p + 2
        space_exponent = min(m, space_cap) / space_cap

    overall = min(coupling_alpha * time_exponent, space_exponent)

    if m >= max(time_cap, space_cap):
        notes = "smooth data: saturated rates"
    elif coupling_alpha * time_exponent < space_exponent:
        notes = "time-limited"
    elif coupling_alpha * time_exponent > space_exponent:
        notes = "space-limited"
    else:
        notes = "balanced"
    return RatePrediction(time_exponent, space_exponent, overall, notes)


def optimal_mollifier_width(dt: float, dx: float, p: int, kind: SchemeKind, theta: float) -> float:
    """Regularization scale δ that balances the time and space error terms."""
    kind = SchemeKind(kind)
    time_cap = 6 * p + 3 if _is_crank_nicolson(theta) else 4 * p + 2
    space_cap = 2 * p + 3 if kind is SchemeKind.CENTRAL else 2 * p + 2
    return dt ** (1.0 / time_cap) + dx ** (1.0 / space_cap)


# ─────────────────────────────────────────────────────────────────────────────
# Consistency error
# ─────────────────────────────────────────────────────────────────────────────
def _difference_symbol(scheme: SchemeSpec, grid: GridSpec) -> np.ndarray:
    """DFT-diagonal of D: the kind symbol at ξ = −k̃/J, divided by dx^(2p+1)."""
    xi = -grid.signed_modes() / grid.cell_count
    return kind_symbol(scheme.kind, scheme.p, xi) / grid.dx ** scheme.order


def _time_difference(grid: GridSpec, p: int) -> np.ndarray:
    """(e^{−iφ_k} − 1)/dt over one exact step, written without cancellation."""
    phase = exact_phases(grid, p, grid.dt)
    return (-2.0 * np.sin(phase / 2.0) ** 2 - 1j * np.sin(phase)) / grid.dt


def consistency_error(
    scheme: SchemeSpec,
    grid: GridSpec,
    datum: InitialDatum,
    p: int,
    n: int,
) -> FieldState:
    """
    Residual of the scheme on exact cell averages at level n.

    ε^n = (u^{n+1} − u^n)/dt + θ·D u^{n+1} + (1−θ)·D u^n, evaluated mode by
    mode from the exact evolution of the projected datum.
    """
    if p != scheme.p:
        raise ValueError(f"p={p} does not match the scheme's p={scheme.p}")
    if n < 0:
        raise ValueError(f"n must be ≥ 0, got {n}")
    u_n = exact_evolve(cell_average_projection(datum, grid), grid, p, grid.time(n))
    one_step = exact_multipliers(grid, p, grid.dt)
    symbol = _difference_symbol(scheme, grid)
    residual = _time_difference(grid, p) + symbol * (scheme.theta * one_step + (1.0 - scheme.theta))
    return FieldState(inverse_dft(dft(u_n) * residual), n)


# ─────────────────────────────────────────────────────────────────────────────
# Convergence error
# ─────────────────────────────────────────────────────────────────────────────
def convergence_error(numerical: FieldState, exact_cell_averages: FieldState, grid: GridSpec) -> float:
    """ℓ²_Δ norm of the difference of two fields on the same grid."""
    if numerical.cell_count != exact_cell_averages.cell_count:
        raise GridMismatchError(
            f"fields have {numerical.cell_count} and {exact_cell_averages.cell_count} cells"
        )
    return l2_discrete_norm(numerical.values - exact_cell_averages.values, grid)


def sample_steps(n_steps: int, budget: Optional[int] = None) -> List[int]:
    """Every step when N ≤ budget, otherwise ~budget evenly spaced steps plus N."""
    budget = settings.time_samples if budget is None else budget
    if n_steps <= budget:
        return list(range(1, n_steps + 1))
    picks = np.unique(np.linspace(1, n_steps, budget).round().astype(int))
    return sorted(set(picks.tolist()) | {n_steps})


def time_sampled_error(
    op: StepOperator,
    initial: FieldState,
    p: int,
    n_steps: int,
    budget: Optional[int] = None,
) -> Tuple[float, FieldState]:
    """
    sup over sampled levels n of ‖vⁿ − exact cell averages at tⁿ‖.

    Returns the error and the final numerical state.  BlowUpError from the
    stepper propagates.
    """
    grid = op.grid
    checkpoints = set(sample_steps(n_steps, budget))
    ceiling = settings.blowup_factor * l2_discrete_norm(initial, grid)
    worst = 0.0
    state = initial
    for n in range(1, n_steps + 1):
        state = step(op, state)
        if ceiling > 0 and l2_discrete_norm(state, grid) > ceiling:
            raise BlowUpError(state.time_index, "norm grew beyond the blow-up factor")
        if n in checkpoints:
            exact = exact_evolve(initial, grid, p, grid.time(n))
            worst = max(worst, convergence_error(state, exact, grid))
    return worst, state


# ─────────────────────────────────────────────────────────────────────────────
# Orders
# ─────────────────────────────────────────────────────────────────────────────
def observed_order(errors: Sequence[Tuple[float, float]]) -> List[float]:
    """order_i = log(e_{i−1}/e_i) / log(dx_{i−1}/dx_i), i.e. log₂ ratio when dx halves."""
    if len(errors) < 2:
        raise ValueError("at least two (dx, error) pairs are needed")
    for index, (_, error) in enumerate(errors):
        if not (error > 0 and math.isfinite(error)):
            raise DegenerateErrorValue(error, index)
    orders = []
    for (dx_prev, e_prev), (dx_next, e_next) in zip(errors[:-1], errors[1:]):
        if not dx_next < dx_prev:
            raise ValueError(f"dx must decrease strictly, got {dx_prev} then {dx_next}")
        orders.append(math.log(e_prev / e_next) / math.log(dx_prev / dx_next))
    return orders


def fit_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of log y against log x."""
    x_arr, y_arr = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x_arr.size < 2 or np.any(x_arr <= 0) or np.any(y_arr <= 0):
        raise ValueError("need at least two strictly positive points")
    slope, _ = np.polyfit(np.log(x_arr), np.log(y_arr), 1)
    logger.debug("📐 Fitted slope {:.4f} over {} points", slope, x_arr.size)
    return float(slope)
