"""Discrete active-inference agents managing SLOiDs in a simulated streaming pipeline."""

__version__ = "0.1.0"
