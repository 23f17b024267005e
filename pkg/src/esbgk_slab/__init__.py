"""Stationary slab solutions of the ellipsoidal-statistical BGK kinetic model."""

__version__ = "0.1.0"
