"""
superfrac: fractional derivatives of spectral interpolants and GJF
Petrov-Galerkin solvers, with their superconvergence points.

Numerical services live in superfrac.services; the command adapters,
their registry and the YAML-driven settings live in superfrac.pipeline.
"""

__version__ = '1.0.0'
