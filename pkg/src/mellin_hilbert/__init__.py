"""Mellin transforms on strips, the half-line Hilbert transform and a solver for H rho = e."""
__version__ = "0.1.0"
