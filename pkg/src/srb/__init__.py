"""Subspace randomized benchmarking of two-qubit entangling gates."""
__version__ = "0.1.0"
