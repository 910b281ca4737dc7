"""Suppression laws for permutation-symmetric many-particle interference."""
__version__ = "0.1.0"
