"""Exact computations with secant and tangential varieties of Segre products."""
__version__ = "0.1.0"
