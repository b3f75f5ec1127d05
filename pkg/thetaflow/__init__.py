"""ThetaFlow: θ-schemes for odd-order dispersive equations on the torus."""

__version__ = "1.0.0"
