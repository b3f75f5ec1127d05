"""
ThetaFlow – Error Hierarchy
============================
Every failure the library raises on purpose derives from ``ThetaFlowError``.
Input problems also derive from ``ValueError``; numerical failures from
``RuntimeError``. ``exit_code`` is what the CLI returns when the error
reaches it.
"""

from __future__ import annotations

from typing import Optional


class ThetaFlowError(Exception):
    """Base class for all thetaflow errors."""

    exit_code: int = 1


# ─────────────────────────────────────────────────────────────────────────────
# Input / validation errors
# ─────────────────────────────────────────────────────────────────────────────
class ConfigError(ThetaFlowError, ValueError):
    """Configuration file or flag could not be parsed or validated."""

    exit_code = 2


class NonFiniteFieldError(ThetaFlowError, ValueError):
    def __init__(self, message: str = "non-finite field") -> None:
        super().__init__(message)


class GridMismatchError(ThetaFlowError, ValueError):
    """Two fields or a field and a grid disagree on the cell count."""


class StencilOrderError(ThetaFlowError, ValueError):
    def __init__(self, p: int, p_max: int) -> None:
        super().__init__(f"stencil order too large: p={p} exceeds p_max={p_max}")
        self.p = p
        self.p_max = p_max


class GridResolutionError(ThetaFlowError, ValueError):
    def __init__(self, dx: float, order: int) -> None:
        super().__init__(f"grid too fine for order: dx={dx:.3e}, dx^{order} underflows")
        self.dx = dx
        self.order = order


class ParityError(ThetaFlowError, ValueError):
    """Stencil kind / parity pairing with no stable scheme."""

    exit_code = 2

    def __init__(self, kind: str, p: int) -> None:
        super().__init__(f"no convergent scheme for this parity: {kind} with p={p}")
        self.kind = kind
        self.p = p


class DegenerateErrorValue(ThetaFlowError, ValueError):
    def __init__(self, value: float, index: int) -> None:
        super().__init__(f"degenerate error value {value!r} at position {index}")
        self.value = value
        self.index = index


# ─────────────────────────────────────────────────────────────────────────────
# Numerical / runtime errors
# ─────────────────────────────────────────────────────────────────────────────
class SingularSymbolError(ThetaFlowError, RuntimeError):
    """Denominator of the amplification factor vanished."""

    def __init__(self, xi: float, index: Optional[int] = None) -> None:
        where = f"frequency index k={index} (ξ={xi:.6g})" if index is not None else f"ξ={xi:.6g}"
        super().__init__(f"singular symbol at {where}")
        self.xi = xi
        self.index = index


class BlowUpError(ThetaFlowError, RuntimeError):
    exit_code = 3

    def __init__(self, step: int, reason: str = "") -> None:
        detail = f" ({reason})" if reason else ""
        super().__init__(f"blow-up at step {step}{detail}")
        self.step = step


class StabilityDisagreement(ThetaFlowError, RuntimeError):
    """Sampled verdict and closed-form prediction differ."""

    exit_code = 4


class VerificationError(ThetaFlowError, RuntimeError):
    exit_code = 5

    def __init__(self, prop: str, detail: str = "") -> None:
        super().__init__(f"verification failed: {prop}" + (f": {detail}" if detail else ""))
        self.prop = prop
