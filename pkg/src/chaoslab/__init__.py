"""Exact-arithmetic experiments on rationalized computation and learning iterations."""

__version__ = "0.1.0"
