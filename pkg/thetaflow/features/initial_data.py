"""
ThetaFlow – Initial Data & Mollification
=========================================
Initial conditions of prescribed Sobolev regularity, their exact cell
averages, the discrete H^s norm and the Fourier-cutoff mollifier.

Data kinds
----------
  • indicator_integrated(k)  k-fold periodic antiderivative of 1_[a,b]; lies in
                             H^s for every s < 1/2 + k.  Piecewise polynomial,
                             so cell averages are exact.
  • fourier_synthetic(m)     Σ (1+k²)^(−(m+0.51)/2) cos(2πkx/L + φ_k), phases
                             drawn from the seed; lies in H^m.
  • gaussian(center, width)  periodized smooth bump, averaged through its Fourier series.
  • single_mode(k)           Re(c·e^{2πikx/L}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from numpy.polynomial import Polynomial

from thetaflow.config import settings
from thetaflow.core.grid import FieldState, GridSpec, dft, inverse_dft

# ─────────────────────────────────────────────────────────────────────────────
# Defaults
# ─────────────────────────────────────────────────────────────────────────────
DEFAULT_INTERVAL = (20.0, 25.0)
DEFAULT_CENTER = 25.0
DEFAULT_WIDTH = 1.0
SYNTHETIC_MARGIN = 0.01        # exponent slack keeping the series inside H^m
GAUSSIAN_TAIL = 40.0           # modes kept while exp(−2π²n²w²/L²) > e^−40


class DatumKind(str, Enum):
    INDICATOR_INTEGRATED = "indicator_integrated"
    FOURIER_SYNTHETIC = "fourier_synthetic"
    GAUSSIAN = "gaussian"
    SINGLE_MODE = "single_mode"


class CutoffProfile(str, Enum):
    SMOOTH = "smooth"              # C^∞ transition built from exp(−1/x)
    SMOOTHSTEP = "smoothstep"      # septic polynomial, C³


# ─────────────────────────────────────────────────────────────────────────────
# Data Classes
# ─────────────────────────────────────────────────────────────────────────────
@dataclass(frozen=True)
class InitialDatum:
    """One initial condition u₀; only the fields of its kind are read."""

    kind:       DatumKind
    amplitude:  float = 1.0
    # indicator_integrated
    k:          int = 1
    interval:   Tuple[float, float] = DEFAULT_INTERVAL
    # fourier_synthetic
    m:          float = 1.5
    seed:       int = 0
    mode_cap:   Optional[int] = None
    # gaussian
    center:     float = DEFAULT_CENTER
    width:      float = DEFAULT_WIDTH
    # single_mode
    mode_index: int = 1
    phase:      float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", DatumKind(self.kind))
        object.__setattr__(self, "interval", tuple(float(v) for v in self.interval))
        if self.kind is DatumKind.INDICATOR_INTEGRATED:
            if self.k < 0:
                raise ValueError(f"k must be ≥ 0, got {self.k}")
            a, b = self.interval
            if not a < b:
                raise ValueError(f"interval must satisfy a < b, got {self.interval}")
        elif self.kind is DatumKind.FOURIER_SYNTHETIC and not self.m > 0:
            raise ValueError(f"m must be positive, got {self.m}")
        elif self.kind is DatumKind.GAUSSIAN and not self.width > 0:
            raise ValueError(f"width must be positive, got {self.width}")

    # ── Constructors ─────────────────────────────────────────────────────────
    @classmethod
    def indicator_integrated(
        cls, k: int, interval: Tuple[float, float] = DEFAULT_INTERVAL, amplitude: float = 1.0
    ) -> "InitialDatum":
        return cls(DatumKind.INDICATOR_INTEGRATED, amplitude=amplitude, k=k, interval=interval)

    @classmethod
    def fourier_synthetic(
        cls, m: float, seed: int = 0, amplitude: float = 1.0, mode_cap: Optional[int] = None
    ) -> "InitialDatum":
        return cls(DatumKind.FOURIER_SYNTHETIC, amplitude=amplitude, m=m, seed=seed, mode_cap=mode_cap)

    @classmethod
    def gaussian(
        cls, center: float = DEFAULT_CENTER, width: float = DEFAULT_WIDTH, amplitude: float = 1.0
    ) -> "InitialDatum":
        return cls(DatumKind.GAUSSIAN, amplitude=amplitude, center=center, width=width)

    @classmethod
    def single_mode(cls, mode_index: int, amplitude: float = 1.0, phase: float = 0.0) -> "InitialDatum":
        return cls(DatumKind.SINGLE_MODE, amplitude=amplitude, mode_index=mode_index, phase=phase)

    # ── Properties ───────────────────────────────────────────────────────────
    @property
    def regularity(self) -> float:
        """Sobolev index m that drives the theoretical rates."""
        if self.kind is DatumKind.INDICATOR_INTEGRATED:
            return 0.5 + self.k
        if self.kind is DatumKind.FOURIER_SYNTHETIC:
            return self.m
        return math.inf

    @property
    def label(self) -> str:
        if self.kind is DatumKind.INDICATOR_INTEGRATED:
            return f"indicator∫^{self.k}"
        if self.kind is DatumKind.FOURIER_SYNTHETIC:
            return f"fourier(m={self.m:g}, seed={self.seed})"
        if self.kind is DatumKind.GAUSSIAN:
            return f"gaussian(c={self.center:g}, w={self.width:g})"
        return f"mode(k={self.mode_index})"

    def scaled(self, factor: float) -> "InitialDatum":
        return replace(self, amplitude=self.amplitude * factor)


@dataclass(frozen=True)
class Mollifier:
    """Fourier cutoff u ↦ u ⋆ φ^δ with φ̂^δ(ξ) = χ(δξ)."""

    delta:   float
    profile: CutoffProfile = CutoffProfile.SMOOTH

    def __post_init__(self) -> None:
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        object.__setattr__(self, "profile", CutoffProfile(self.profile))

    def multipliers(self, grid: GridSpec) -> np.ndarray:
        return cutoff(self.delta * grid.wavenumbers(), self.profile)


# ─────────────────────────────────────────────────────────────────────────────
# Cutoff profile χ
# ─────────────────────────────────────────────────────────────────────────────
def nonanalytic_smooth_transition(t: np.ndarray) -> np.ndarray:
    """C^∞ step from 0 (t ≤ 0) to 1 (t ≥ 1): ψ(t) / (ψ(t) + ψ(1−t)), ψ(t) = exp(−1/t)·[t > 0]."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)

    def psi(x: np.ndarray) -> np.ndarray:
        safe = np.where(x > 0.0, x, 1.0)
        return np.where(x > 0.0, np.exp(-1.0 / safe), 0.0)

    a, b = psi(t), psi(1.0 - t)
    return a / (a + b)


def smoothstep(t: np.ndarray) -> np.ndarray:
    """Septic smoothstep, three vanishing derivatives at both ends."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    return t**4 * (35.0 - 84.0 * t + 70.0 * t**2 - 20.0 * t**3)


def cutoff(x: np.ndarray, profile: CutoffProfile = CutoffProfile.SMOOTH) -> np.ndarray:
    """χ(x): 1 on |x| ≤ 1/2, 0 on |x| ≥ 1, even and monotone in between."""
    step = nonanalytic_smooth_transition if CutoffProfile(profile) is CutoffProfile.SMOOTH else smoothstep
    r = np.abs(np.asarray(x, dtype=float))
    return 1.0 - step(2.0 * r - 1.0)


# ─────────────────────────────────────────────────────────────────────────────
# Piecewise polynomials (integrated indicators)
# ─────────────────────────────────────────────────────────────────────────────
class _Piecewise:
    """Polynomial pieces on consecutive intervals of [edges[0], edges[-1]]."""

    def __init__(self, edges: Sequence[float], pieces: List[Polynomial]) -> None:
        self.edges = np.asarray(edges, dtype=float)
        self.pieces = pieces

    def integrate(self) -> "_Piecewise":
        """Continuous antiderivative vanishing at the left edge."""
        acc = 0.0
        out = []
        for lo, hi, poly in zip(self.edges[:-1], self.edges[1:], self.pieces):
            antiderivative = poly.integ(lbnd=lo, k=[acc])
            out.append(antiderivative)
            acc = float(antiderivative(hi))
        return _Piecewise(self.edges, out)

    def mean(self) -> float:
        length = self.edges[-1] - self.edges[0]
        return float(self.integrate()(np.array([self.edges[-1]]))[0]) / length

    def shift(self, c: float) -> "_Piecewise":
        return _Piecewise(self.edges, [poly - c for poly in self.pieces])

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        index = np.clip(np.searchsorted(self.edges, x, side="right") - 1, 0, len(self.pieces) - 1)
        out = np.empty_like(x)
        for i, poly in enumerate(self.pieces):
            mask = index == i
            if np.any(mask):
                out[mask] = poly(x[mask])
        return out


def _integrated_indicator(datum: InitialDatum, length: float) -> _Piecewise:
    a, b = datum.interval
    if a < 0.0 or b > length:
        logger.warning("⚠️  Indicator interval {} leaves [0, {:g}]; truncated", datum.interval, length)
        a, b = max(a, 0.0), min(b, length)
    zero, one = Polynomial([0.0]), Polynomial([1.0])
    u = _Piecewise([0.0, a, b, length], [zero, one, zero])
    for _ in range(datum.k):
        # mean-free before each integration keeps every antiderivative periodic
        u = u.shift(u.mean()).integrate()
    if datum.k > 0:
        u = u.shift(u.mean())
    return u


# ─────────────────────────────────────────────────────────────────────────────
# Projection onto cell averages
# ─────────────────────────────────────────────────────────────────────────────
def _indicator_averages(datum: InitialDatum, grid: GridSpec) -> np.ndarray:
    antiderivative = _integrated_indicator(datum, grid.domain_length).integrate()
    primitive = antiderivative(grid.cell_edges())
    return np.diff(primitive) / grid.dx


def _mode_averages(grid: GridSpec, modes: np.ndarray, coefficients: np.ndarray) -> np.ndarray:
    """Cell averages of Re Σ c_k e^{2πikx/L}, folding every mode onto its DFT bin."""
    J = grid.cell_count
    ratio = modes / J
    # (1/dx)∫_{x_j}^{x_j+dx} e^{2πikx/L} dx = e^{2πikj/J}·e^{iπk/J}·sinc(k/J)
    cell_factor = np.exp(1j * np.pi * ratio) * np.sinc(ratio)
    bins = np.zeros(J, dtype=complex)
    np.add.at(bins, np.mod(modes, J), coefficients * cell_factor)
    return (np.fft.ifft(bins) * J).real


def _synthetic_averages(datum: InitialDatum, grid: GridSpec) -> np.ndarray:
    cap = datum.mode_cap or settings.fourier_mode_cap
    modes = np.arange(1, cap + 1)
    magnitudes = (1.0 + modes.astype(float) ** 2) ** (-(datum.m + 0.5 + SYNTHETIC_MARGIN) / 2.0)
    phases = np.random.default_rng(datum.seed).uniform(0.0, 2.0 * np.pi, size=cap)
    return _mode_averages(grid, modes, magnitudes * np.exp(1j * phases))


def _gaussian_averages(datum: InitialDatum, grid: GridSpec) -> np.ndarray:
    # exact Fourier series of the periodized bump; no differences of nearby values
    L = grid.domain_length
    decay = 2.0 * (math.pi * datum.width / L) ** 2
    cap = int(math.ceil(math.sqrt(GAUSSIAN_TAIL / decay)))
    if cap > settings.fourier_mode_cap:
        logger.warning(
            "⚠️  Gaussian width {:g} needs {} modes; truncated at {}",
            datum.width, cap, settings.fourier_mode_cap,
        )
        cap = settings.fourier_mode_cap
    modes = np.arange(cap + 1)
    coefficients = (
        datum.width * math.sqrt(2.0 * math.pi) / L
        * np.exp(-decay * modes.astype(float) ** 2)
        * np.exp(-2j * np.pi * modes * datum.center / L)
    )
    coefficients[1:] *= 2.0
    return _mode_averages(grid, modes, coefficients)


def _single_mode_averages(datum: InitialDatum, grid: GridSpec) -> np.ndarray:
    modes = np.array([datum.mode_index])
    return _mode_averages(grid, modes, np.array([np.exp(1j * datum.phase)]))


_PROJECTORS = {
    DatumKind.INDICATOR_INTEGRATED: _indicator_averages,
    DatumKind.FOURIER_SYNTHETIC: _synthetic_averages,
    DatumKind.GAUSSIAN: _gaussian_averages,
    DatumKind.SINGLE_MODE: _single_mode_averages,
}


def cell_average_projection(datum: InitialDatum, grid: GridSpec) -> FieldState:
    """v_j⁰ = (1/dx)∫_{x_j}^{x_{j+1}} u₀, computed in closed form."""
    values = _PROJECTORS[datum.kind](datum, grid)
    return FieldState(datum.amplitude * values, 0)


# ─────────────────────────────────────────────────────────────────────────────
# Sobolev norm & mollifier
# ─────────────────────────────────────────────────────────────────────────────
def sobolev_norm(state: FieldState, grid: GridSpec, s: float) -> float:
    """sqrt(Σ_k (1+ξ_k²)^s |û_k|²·dx/J); s = 0 gives the ℓ²_Δ norm."""
    if s < 0:
        raise ValueError(f"s must be ≥ 0, got {s}")
    state.conforms_to(grid)
    weights = (1.0 + grid.wavenumbers() ** 2) ** s
    energy = np.sum(weights * np.abs(dft(state)) ** 2)
    return float(np.sqrt(energy * grid.dx / grid.cell_count))


def mollify(state: FieldState, grid: GridSpec, mol: Mollifier) -> FieldState:
    """Multiply mode k by χ(δ·ξ_k)."""
    state.conforms_to(grid)
    smoothed = inverse_dft(dft(state) * mol.multipliers(grid))
    return FieldState(smoothed, state.time_index)
