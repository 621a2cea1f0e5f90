"""Exact bundle gerbe calculus over finite simplicial complexes."""

__version__ = "0.1.0"
