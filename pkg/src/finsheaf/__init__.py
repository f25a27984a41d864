"""Exact sheaf and presheaf computations over finite topological spaces."""

__version__ = "0.1.0"
