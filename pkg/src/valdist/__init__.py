"""Numerical and exact verifiers for value distribution of holomorphic curves
into projective varieties and Gauss maps of minimal surfaces."""

__version__ = "0.1.0"
