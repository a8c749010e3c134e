"""Entropic uncertainty dynamics in two-level non-Hermitian systems."""

__version__ = "0.1.0"
