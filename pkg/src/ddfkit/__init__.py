"""Directed distance fields with exact shape-induced oracles."""

__version__ = "0.1.0"
