"""Singular series for prime k-tuples and polynomial prime patterns."""

__version__ = "0.1.0"
