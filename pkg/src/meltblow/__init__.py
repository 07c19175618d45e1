"""Divergence-free Gaussian turbulence sampling and melt-blowing jet simulation."""

__version__ = "0.1.0"
