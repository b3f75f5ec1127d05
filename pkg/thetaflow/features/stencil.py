"""
ThetaFlow – Odd-Order Difference Stencils
==========================================
Forward, backward and central approximations of ∂ₓ^(2p+1) on the periodic grid:

  • Forward   offsets p+1−k, weights C(2p+1,k)(−1)^k,  k = 0..2p+1
  • Backward  the forward stencil shifted one cell to the left
  • Central   entrywise mean of forward and backward on the union of offsets

Weights are built in exact rational arithmetic and only converted to floats
at the end; division by dx^(2p+1) happens when the stencil is applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Optional, Tuple

import numpy as np
from loguru import logger

from thetaflow.config import settings
from thetaflow.core.exceptions import GridResolutionError, StencilOrderError
from thetaflow.core.grid import FieldState, GridSpec


# ─────────────────────────────────────────────────────────────────────────────
# Scheme description
# ─────────────────────────────────────────────────────────────────────────────
class SchemeKind(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"
    CENTRAL = "central"


@dataclass(frozen=True)
class SchemeSpec:
    """Stencil kind, derivative parameter p and implicitness θ."""

    kind:  SchemeKind
    p:     int
    theta: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", SchemeKind(self.kind))
        if self.p < 0:
            raise ValueError(f"p must be ≥ 0, got {self.p}")
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta must lie in [0, 1], got {self.theta}")

    @property
    def order(self) -> int:
        """Derivative order 2p+1."""
        return 2 * self.p + 1

    @property
    def label(self) -> str:
        return f"{self.kind.value} p={self.p} θ={self.theta:g}"


@dataclass(frozen=True)
class StencilWeights:
    """Offsets (descending) and dimensionless weights before the dx^(2p+1) division."""

    offsets: Tuple[int, ...]
    weights: Tuple[float, ...]
    exact:   Tuple[Fraction, ...]

    def moment(self, power: int) -> Fraction:
        """Σ w·offset^power, exactly."""
        return sum((w * Fraction(o) ** power for o, w in zip(self.offsets, self.exact)), Fraction(0))


# ─────────────────────────────────────────────────────────────────────────────
# Construction
# ─────────────────────────────────────────────────────────────────────────────
def _check_order(p: int, p_max: Optional[int] = None) -> None:
    limit = settings.p_max if p_max is None else p_max
    if p > limit:
        raise StencilOrderError(p, limit)


def _forward_exact(p: int) -> Dict[int, Fraction]:
    q = 2 * p + 1
    return {p + 1 - k: Fraction(math.comb(q, k) * (-1) ** k) for k in range(q + 1)}


def _pack(table: Dict[int, Fraction]) -> StencilWeights:
    items = sorted(((o, w) for o, w in table.items() if w != 0), reverse=True)
    return StencilWeights(
        offsets=tuple(o for o, _ in items),
        weights=tuple(float(w) for _, w in items),
        exact=tuple(w for _, w in items),
    )


def build_stencil(scheme: SchemeSpec, p_max: Optional[int] = None) -> StencilWeights:
    """
    Difference weights for the scheme's kind and p.

    Raises StencilOrderError when p exceeds ``p_max`` (settings default 6).
    """
    _check_order(scheme.p, p_max)
    forward = _forward_exact(scheme.p)
    if scheme.kind is SchemeKind.FORWARD:
        return _pack(forward)

    backward = {o - 1: w for o, w in forward.items()}
    if scheme.kind is SchemeKind.BACKWARD:
        return _pack(backward)

    union = set(forward) | set(backward)
    central = {
        o: (forward.get(o, Fraction(0)) + backward.get(o, Fraction(0))) / 2
        for o in union
    }
    return _pack(central)


# ─────────────────────────────────────────────────────────────────────────────
# Application
# ─────────────────────────────────────────────────────────────────────────────
def apply(weights: StencilWeights, state: FieldState, grid: GridSpec, p: int) -> FieldState:
    """(D v)_j = Σ w·v_{j+offset} / dx^(2p+1), indices wrapping periodically."""
    state.conforms_to(grid)
    order = 2 * p + 1
    scale = grid.dx ** order
    if scale == 0.0:
        raise GridResolutionError(grid.dx, order)

    values = state.values
    out = np.zeros_like(values)
    for offset, weight in zip(weights.offsets, weights.weights):
        # np.roll(v, -o)[j] == v[j + o]
        out += weight * np.roll(values, -offset)
    return FieldState(out / scale, state.time_index)


# ─────────────────────────────────────────────────────────────────────────────
# Divided-difference identity
# ─────────────────────────────────────────────────────────────────────────────
def signed_power_sum(p: int, l: int) -> int:
    """Σ_k C(2p+1,k)(−1)^k (p−k+1)^l in integer arithmetic."""
    q = 2 * p + 1
    return sum(math.comb(q, k) * (-1) ** k * (p - k + 1) ** l for k in range(q + 1))


def lemma1_lhs(p: int, l: int, p_max: Optional[int] = None) -> float:
    """
    The divided-difference sum behind stencil exactness.

    Zero for l < 2p+1, (2p+1)! at l = 2p+1, and l!/(l−2p−1)!·ξ^(l−2p−1)
    for some ξ in (−p, p+1) beyond that.
    """
    _check_order(p, p_max)
    if not 0 <= l <= 3 * (2 * p + 1):
        raise ValueError(f"l must lie in [0, {3 * (2 * p + 1)}], got {l}")
    total = signed_power_sum(p, l)
    try:
        return float(total)
    except OverflowError as exc:
        logger.error("Moment sum overflows a float | p={} l={}", p, l)
        raise OverflowError(f"exact sum for p={p}, l={l} does not fit a float") from exc


def moment_witness(p: int, l: int) -> Optional[float]:
    """
    The ξ implied by lemma1_lhs for l > 2p+1 and odd exponent l−2p−1.

    Returns None for even exponents, where the sign of ξ is lost.
    """
    exponent = l - (2 * p + 1)
    if exponent <= 0 or exponent % 2 == 0:
        return None
    power = Fraction(signed_power_sum(p, l), math.factorial(l) // math.factorial(exponent))
    magnitude = float(abs(power)) ** (1.0 / exponent)
    return math.copysign(magnitude, float(power))
