"""Partial zeta values of number fields from Q-closed cone sums."""

__version__ = "0.1.0"
