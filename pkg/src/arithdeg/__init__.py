"""Arithmetic and dynamical degrees of rational maps of the projective plane."""

__version__ = "0.1.0"
