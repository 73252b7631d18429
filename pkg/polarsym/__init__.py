"""Numerical certification of the symplectic geometry of polar group actions."""

__version__ = "0.1.0"
