"""Degree-one primes and heights: S-unit values, elliptic denominators, experiments."""

__version__ = "0.1.0"
