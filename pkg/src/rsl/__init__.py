"""Numerical laboratory for the Riemann zero count, class-C periodic-orbit
sums and random-matrix spectral statistics."""

__version__ = "0.1.0"
