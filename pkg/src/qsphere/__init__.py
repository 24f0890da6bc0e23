"""Exact computations on quantum Euclidean spheres and their differential calculi."""

__version__ = "0.1.0"
