"""Exact combinatorics of partial flag manifold pieces and intertwiner bases."""

__version__ = "0.1.0"
