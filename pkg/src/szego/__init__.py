"""Numerical laboratory for the cubic Szego equation on the real line."""

__version__ = "0.1.0"
