"""Proximity networks of industries built from industry-by-product output tables."""

__version__ = "0.1.0"
