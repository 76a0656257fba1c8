"""Covert semantic communication power-control laboratory."""

__version__ = "0.1.0"
