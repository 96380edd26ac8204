"""Framed surfaces in hyperbolic 3-space: invariants, singularities, transports."""

__version__ = "0.1.0"
