"""Exact machinery for realising prescribed independent-set counts."""

__version__ = "0.1.0"
