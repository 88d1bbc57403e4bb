"""Continuous-variable QKD security bounds and protocol simulation."""

__version__ = "0.1.0"
