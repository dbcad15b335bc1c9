"""Numerical lab for resonance points, scattering phases and the spectral shift function."""

__version__ = "0.1.0"
