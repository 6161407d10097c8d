"""Exact computations for multidimensional constant-shape substitutions."""

__version__ = "0.1.0"
