"""
ThetaFlow – Experiment Schemas
===============================
Pydantic models for one convergence experiment.  Unknown fields are
rejected so a typo in a config file never silently falls back to a default.
"""

from __future__ import annotations

import re
from enum import Enum
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from thetaflow.config import settings
from thetaflow.features.initial_data import DatumKind, InitialDatum
from thetaflow.features.stencil import SchemeKind, SchemeSpec

DEFAULT_J_LIST = [800 * 2**i for i in range(8)]

# Parameters each datum kind accepts (amplitude is common to all)
DATUM_PARAMS: Dict[DatumKind, set] = {
    DatumKind.INDICATOR_INTEGRATED: {"k", "a", "b"},
    DatumKind.FOURIER_SYNTHETIC: {"m", "seed", "mode_cap"},
    DatumKind.GAUSSIAN: {"center", "width"},
    DatumKind.SINGLE_MODE: {"mode_index", "phase"},
}


class Comparison(str, Enum):
    REFINEMENT_PAIR = "refinement_pair"
    EXACT_REFERENCE = "exact_reference"


def _snake(value: str) -> str:
    """'RefinementPair' / 'refinement-pair' → 'refinement_pair'."""
    value = re.sub(r"(?<=[a-z0-9])(?=[A-Z])", "_", value.strip())
    return value.replace("-", "_").replace(" ", "_").lower()


# ─────────────────────────────────────────────────────────────────────────────
# Datum
# ─────────────────────────────────────────────────────────────────────────────
class DatumConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind:   DatumKind = Field(DatumKind.INDICATOR_INTEGRATED, description="Initial data family")
    params: Dict[str, float] = Field(default_factory=lambda: {"k": 1.0})

    @field_validator("kind", mode="before")
    @classmethod
    def normalise_kind(cls, v):
        return _snake(v) if isinstance(v, str) else v

    @model_validator(mode="after")
    def check_params(self) -> "DatumConfig":
        allowed = DATUM_PARAMS[self.kind] | {"amplitude"}
        unknown = set(self.params) - allowed
        if unknown:
            raise ValueError(
                f"unknown parameter(s) {sorted(unknown)} for datum '{self.kind.value}'; "
                f"allowed: {sorted(allowed)}"
            )
        return self

    def build(self, seed: int = 0) -> InitialDatum:
        """Materialize the InitialDatum; ``seed`` fills in a missing synthetic seed."""
        params = self.params
        amplitude = params.get("amplitude", 1.0)
        if self.kind is DatumKind.INDICATOR_INTEGRATED:
            interval = (params.get("a", 20.0), params.get("b", 25.0))
            return InitialDatum.indicator_integrated(int(params.get("k", 1)), interval, amplitude)
        if self.kind is DatumKind.FOURIER_SYNTHETIC:
            cap = params.get("mode_cap")
            return InitialDatum.fourier_synthetic(
                params.get("m", 1.5),
                int(params.get("seed", seed)),
                amplitude,
                int(cap) if cap is not None else None,
            )
        if self.kind is DatumKind.GAUSSIAN:
            return InitialDatum.gaussian(params.get("center", 25.0), params.get("width", 1.0), amplitude)
        return InitialDatum.single_mode(int(params.get("mode_index", 1)), amplitude, params.get("phase", 0.0))


# ─────────────────────────────────────────────────────────────────────────────
# Experiment
# ─────────────────────────────────────────────────────────────────────────────
class ExperimentConfig(BaseModel):
    """One convergence study (or a sweep over m when ``m_values`` is set)."""

    model_config = ConfigDict(extra="forbid")

    p:               int = Field(0, ge=0, description="Derivative parameter, order 2p+1")
    kind:            Literal["auto", "forward", "backward", "central"] = Field("auto")
    theta:           float = Field(1.0, ge=0.0, le=1.0, description="Implicitness θ")
    domain_length:   float = Field(50.0, gt=0.0)
    T:               float = Field(0.1, gt=0.0, description="Final time")
    J_list:          List[int] = Field(default_factory=lambda: list(DEFAULT_J_LIST))
    alpha:           float = Field(1.0, gt=0.0, description="Coupling dt = dx^alpha")
    datum:           DatumConfig = Field(default_factory=DatumConfig)
    comparison:      Comparison = Field(Comparison.REFINEMENT_PAIR)
    seed:            int = Field(0)
    output_dir:      str = Field(default_factory=lambda: settings.output_dir)
    m_values:        Optional[List[float]] = Field(None, description="Regularity sweep")
    growth_constant: Optional[float] = Field(None, ge=0.0)

    @field_validator("kind", mode="before")
    @classmethod
    def normalise_scheme_kind(cls, v):
        return v.strip().lower() if isinstance(v, str) else v

    @field_validator("comparison", mode="before")
    @classmethod
    def normalise_comparison(cls, v):
        return _snake(v) if isinstance(v, str) else v

    @field_validator("J_list")
    @classmethod
    def validate_j_list(cls, v: List[int]) -> List[int]:
        if not v:
            raise ValueError("J_list must not be empty")
        if any(j < 4 for j in v):
            raise ValueError(f"every J must be ≥ 4, got {v}")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError(f"J_list must be strictly increasing, got {v}")
        return v

    @field_validator("m_values")
    @classmethod
    def validate_m_values(cls, v: Optional[List[float]]) -> Optional[List[float]]:
        if v is not None and any(m <= 0 for m in v):
            raise ValueError(f"m_values must be positive, got {v}")
        return v

    @model_validator(mode="after")
    def check_refinement_pairs(self) -> "ExperimentConfig":
        if self.comparison is Comparison.REFINEMENT_PAIR and any(j % 2 for j in self.J_list):
            raise ValueError(f"refinement-pair studies need even J, got {self.J_list}")
        return self

    # ── Derived ──────────────────────────────────────────────────────────────
    @property
    def resolved_kind(self) -> SchemeKind:
        """'auto' pairs odd p with forward and even p with backward."""
        if self.kind == "auto":
            return SchemeKind.FORWARD if self.p % 2 else SchemeKind.BACKWARD
        return SchemeKind(self.kind)

    @property
    def scheme(self) -> SchemeSpec:
        return SchemeSpec(self.resolved_kind, self.p, self.theta)

    def initial_datum(self) -> InitialDatum:
        return self.datum.build(self.seed)

    def echo(self) -> dict:
        data = self.model_dump(mode="json")
        data["resolved_kind"] = self.resolved_kind.value
        return data
