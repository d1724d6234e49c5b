"""Exact construction of the space of axially symmetric phylogenetic trees."""

__version__ = "0.1.0"
