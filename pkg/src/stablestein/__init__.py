"""Stein's method for asymmetric alpha-stable laws: numerics, bounds and benchmarks."""

__version__ = "0.1.0"
