# core/__init__.py
# Re-exports the grid types and the error base class for convenience
from .exceptions import ThetaFlowError
from .grid import FieldState, GridSpec, l2_discrete_norm

__all__ = ["FieldState", "GridSpec", "ThetaFlowError", "l2_discrete_norm"]
