"""
ThetaFlow – Von Neumann Stability
==================================
Amplification factors of the θ-schemes and the stability classifier.

One step multiplies the Fourier series V̂(ξ) = Σ v_k e^{2iπkξ} by

    A(ξ) = (1 − (1−θ)·λ·σ(ξ)) / (1 + θ·λ·σ(ξ)),    λ = dt / dx^(2p+1)

with the symbol  σ(ξ) = E(ξ)·(−i)^(2p+1)·(2 sin πξ)^(2p+1)  and
E = e^{−iπξ} (forward), e^{+iπξ} (backward), cos πξ (central).

A scheme is stable when max_ξ |A(ξ)| ≤ 1 + C·dt.  The closed-form table
below is checked against the sampled maximum on every sweep.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np
from loguru import logger

from thetaflow.config import settings
from thetaflow.core.exceptions import SingularSymbolError
from thetaflow.features.stencil import SchemeKind, SchemeSpec

# Relative size below which the denominator 1 + θλσ counts as zero
SINGULAR_TOLERANCE = 1e-13

# Parameter grid of the closed-form cross-check
SWEEP_THETAS  = (0.0, 0.25, 0.5, 0.75, 1.0)
SWEEP_PS      = (0, 1, 2, 3)
SWEEP_RATIOS  = (0.1, 1.0, 10.0)          # dt / dx^(2p+1)
SWEEP_DX      = 1e-2


class Verdict(str, Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"


# ─────────────────────────────────────────────────────────────────────────────
# Data Classes
# ─────────────────────────────────────────────────────────────────────────────
@dataclass(frozen=True, eq=False)
class AmplificationProfile:
    """Sampled |A(ξ)| over [0, 1] for one scheme and step pair."""

    xi_samples:       np.ndarray
    magnitudes:       np.ndarray
    max_magnitude:    float
    scheme:           SchemeSpec
    dt:               float
    dx:               float
    growth_constant:  float
    reason:           str = ""          # non-empty when samples were singular

    @property
    def bound(self) -> float:
        return 1.0 + self.growth_constant * self.dt


@dataclass(frozen=True)
class StabilityVerdict:
    verdict:       Verdict
    max_magnitude: float
    predicted:     Verdict
    profile:       AmplificationProfile = field(repr=False)

    @property
    def agrees(self) -> bool:
        return self.verdict is self.predicted

    def to_dict(self) -> dict:
        return {
            "kind": self.profile.scheme.kind.value,
            "p": self.profile.scheme.p,
            "theta": self.profile.scheme.theta,
            "dt": self.profile.dt,
            "dx": self.profile.dx,
            "max_magnitude": self.max_magnitude,
            "bound": self.profile.bound,
            "sampled": self.verdict.value,
            "table": self.predicted.value,
            "agrees": self.agrees,
            "reason": self.profile.reason,
        }


# ─────────────────────────────────────────────────────────────────────────────
# Symbols
# ─────────────────────────────────────────────────────────────────────────────
def _odd_power_of_minus_i(p: int) -> complex:
    """(−i)^(2p+1) = −i·(−1)^p, exactly."""
    return complex(0.0, -1.0 if p % 2 == 0 else 1.0)


def symbol_sum(p: int, xi: float | np.ndarray) -> complex | np.ndarray:
    """Direct evaluation of Σ_k C(2p+1,k)(−1)^k e^{−2iπ(p−k+1)ξ}."""
    xi_arr = np.asarray(xi, dtype=float)
    q = 2 * p + 1
    total = np.zeros(xi_arr.shape, dtype=complex)
    for k in range(q + 1):
        total += math.comb(q, k) * (-1) ** k * np.exp(-2j * np.pi * (p - k + 1) * xi_arr)
    return complex(total) if total.ndim == 0 else total


def symbol_closed_form(p: int, xi: float | np.ndarray) -> complex | np.ndarray:
    """e^{−iπξ}(−2i sin πξ)^(2p+1)."""
    xi_arr = np.asarray(xi, dtype=float)
    value = (
        np.exp(-1j * np.pi * xi_arr)
        * _odd_power_of_minus_i(p)
        * (2.0 * np.sin(np.pi * xi_arr)) ** (2 * p + 1)
    )
    return complex(value) if np.ndim(value) == 0 else value


def kind_symbol(kind: SchemeKind, p: int, xi: float | np.ndarray) -> np.ndarray:
    """σ(ξ) for the stencil kind, vectorized over ξ."""
    xi_arr = np.asarray(xi, dtype=float)
    kind = SchemeKind(kind)
    if kind is SchemeKind.FORWARD:
        prefactor = np.exp(-1j * np.pi * xi_arr)
    elif kind is SchemeKind.BACKWARD:
        prefactor = np.exp(1j * np.pi * xi_arr)
    else:
        prefactor = np.cos(np.pi * xi_arr).astype(complex)
    return prefactor * _odd_power_of_minus_i(p) * (2.0 * np.sin(np.pi * xi_arr)) ** (2 * p + 1)


# ─────────────────────────────────────────────────────────────────────────────
# Amplification factor
# ─────────────────────────────────────────────────────────────────────────────
def _mesh_ratio(scheme: SchemeSpec, dt: float, dx: float) -> float:
    if dt <= 0 or dx <= 0:
        raise ValueError(f"dt and dx must be positive, got dt={dt}, dx={dx}")
    return dt / dx ** scheme.order


def _split(scheme: SchemeSpec, dt: float, dx: float, xi: np.ndarray):
    ratio = _mesh_ratio(scheme, dt, dx)
    sigma = ratio * kind_symbol(scheme.kind, scheme.p, xi)
    numerator = 1.0 - (1.0 - scheme.theta) * sigma
    denominator = 1.0 + scheme.theta * sigma
    singular = np.abs(denominator) <= SINGULAR_TOLERANCE * np.maximum(1.0, np.abs(sigma))
    return numerator, denominator, singular


def amplification_factors(scheme: SchemeSpec, dt: float, dx: float, xi: np.ndarray) -> np.ndarray:
    """A(ξ) at every entry of ``xi``; raises SingularSymbolError on a vanishing denominator."""
    xi = np.asarray(xi, dtype=float)
    numerator, denominator, singular = _split(scheme, dt, dx, xi)
    if np.any(singular):
        index = int(np.flatnonzero(singular)[0])
        raise SingularSymbolError(float(xi.flat[index]), index)
    return numerator / denominator


def amplification(scheme: SchemeSpec, dt: float, dx: float, xi: float) -> complex:
    """A(ξ) for ξ in [0, 1]."""
    if not 0.0 <= xi <= 1.0:
        raise ValueError(f"xi must lie in [0, 1], got {xi}")
    return complex(amplification_factors(scheme, dt, dx, np.array([xi]))[0])


def amplification_profile(
    scheme: SchemeSpec,
    dt: float,
    dx: float,
    C: Optional[float] = None,
    samples: Optional[int] = None,
) -> AmplificationProfile:
    """|A| on ``samples`` uniform points of [0, 1]; singular points are dropped and noted."""
    C = settings.growth_constant if C is None else C
    samples = settings.xi_samples if samples is None else samples
    if samples < 512:
        raise ValueError(f"samples must be ≥ 512, got {samples}")

    xi = np.linspace(0.0, 1.0, samples)
    numerator, denominator, singular = _split(scheme, dt, dx, xi)
    reason = ""
    if np.any(singular):
        reason = f"singular symbol at ξ={xi[singular][0]:.6g}"
        logger.warning("⚠️  {} | {}", scheme.label, reason)
        xi, numerator, denominator = xi[~singular], numerator[~singular], denominator[~singular]

    magnitudes = np.abs(numerator / denominator)
    return AmplificationProfile(
        xi_samples=xi,
        magnitudes=magnitudes,
        max_magnitude=float(magnitudes.max()) if magnitudes.size else math.inf,
        scheme=scheme,
        dt=dt,
        dx=dx,
        growth_constant=C,
        reason=reason,
    )


# ─────────────────────────────────────────────────────────────────────────────
# Closed-form stability table
# ─────────────────────────────────────────────────────────────────────────────
def unstable_parity(kind: SchemeKind, p: int) -> bool:
    """Forward with even p ≠ 0 and backward with odd p never admit stability."""
    kind = SchemeKind(kind)
    if kind is SchemeKind.FORWARD:
        return p != 0 and p % 2 == 0
    if kind is SchemeKind.BACKWARD:
        return p % 2 == 1
    return False


def table_prediction(scheme: SchemeSpec, dt: float, dx: float, C: Optional[float] = None) -> Verdict:
    """Closed-form CFL predicate for the scheme."""
    C = settings.growth_constant if C is None else C
    p, theta = scheme.p, scheme.theta
    lhs = dt * (1.0 - 2.0 * theta)
    if unstable_parity(scheme.kind, p):
        return Verdict.UNSTABLE

    if scheme.kind is SchemeKind.CENTRAL:
        stable = lhs <= 2.0 * C * dx ** (4 * p + 2) / 2 ** (4 * p)
    elif p == 0:
        # advection: forward needs dt(1−2θ) ≤ −dx, backward dt(1−2θ) ≤ dx
        stable = lhs <= (-dx if scheme.kind is SchemeKind.FORWARD else dx)
    else:
        stable = lhs <= dx ** (2 * p + 1) / 2 ** (2 * p)
    return Verdict.STABLE if stable else Verdict.UNSTABLE


def max_stable_dt(scheme: SchemeSpec, dx: float, C: Optional[float] = None) -> Optional[float]:
    """
    Largest dt the closed-form table admits.

    ``math.inf`` when every dt is stable, None when none is.
    """
    C = settings.growth_constant if C is None else C
    p, theta = scheme.p, scheme.theta
    if unstable_parity(scheme.kind, p):
        return None

    if scheme.kind is SchemeKind.CENTRAL:
        bound = 2.0 * C * dx ** (4 * p + 2) / 2 ** (4 * p)
    elif p == 0:
        bound = -dx if scheme.kind is SchemeKind.FORWARD else dx
    else:
        bound = dx ** (2 * p + 1) / 2 ** (2 * p)

    slope = 1.0 - 2.0 * theta
    if slope <= 0.0:
        # dt·slope ≤ bound holds for all dt when bound ≥ 0, or needs dt ≥ bound/slope
        if bound >= 0.0:
            return math.inf
        return math.inf if slope < 0.0 else None
    if bound < 0.0:
        return None
    return bound / slope


def classify_stability(
    scheme: SchemeSpec,
    dt: float,
    dx: float,
    C: Optional[float] = None,
    samples: Optional[int] = None,
) -> StabilityVerdict:
    """Sampled verdict max|A| ≤ 1 + C·dt, together with the closed-form prediction."""
    profile = amplification_profile(scheme, dt, dx, C, samples)
    stable = not profile.reason and profile.max_magnitude <= profile.bound
    verdict = StabilityVerdict(
        verdict=Verdict.STABLE if stable else Verdict.UNSTABLE,
        max_magnitude=profile.max_magnitude,
        predicted=table_prediction(scheme, dt, dx, profile.growth_constant),
        profile=profile,
    )
    logger.debug(
        "🔎 Stability | {} | dt={:.3e} dx={:.3e} | max|A|={:.6g} | sampled={} table={}",
        scheme.label, dt, dx, verdict.max_magnitude, verdict.verdict.value, verdict.predicted.value,
    )
    return verdict


def stability_sweep(
    thetas: Sequence[float] = SWEEP_THETAS,
    ps: Sequence[int] = SWEEP_PS,
    ratios: Sequence[float] = SWEEP_RATIOS,
    kinds: Sequence[SchemeKind] = tuple(SchemeKind),
    dx: float = SWEEP_DX,
    C: Optional[float] = None,
    samples: Optional[int] = None,
) -> List[StabilityVerdict]:
    """
    Cross-check the sampled classifier against the table on a parameter grid.

    dt is set from the mesh ratio, dt = ratio·dx^(2p+1).  A small dx keeps the
    C·dt slack well below the growth of the genuinely unstable cells.
    """
    results = []
    for theta, p, kind, ratio in itertools.product(thetas, ps, kinds, ratios):
        scheme = SchemeSpec(kind, p, theta)
        results.append(classify_stability(scheme, ratio * dx ** scheme.order, dx, C, samples))

    disagreements = sum(not r.agrees for r in results)
    log = logger.warning if disagreements else logger.info
    log("📊 Stability sweep | {} cases | {} disagreements", len(results), disagreements)
    return results
