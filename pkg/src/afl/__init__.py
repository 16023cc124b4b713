"""Improper affine fronts and flat fronts in hyperbolic space from rational data."""

__version__ = "0.1.0"
