"""Exact parameter computations for principal series of split reductive groups."""

__version__ = "0.1.0"
