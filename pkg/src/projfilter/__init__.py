"""Projective optimality certificates for multiband filter approximation."""

__version__ = "0.1.0"
