"""Realizability-preserving continuous Galerkin solver for the M1 model of radiative transfer."""

__version__ = "0.1.0"
