"""Sparse innovative network coding for erasure broadcast channels."""

__version__ = "0.1.0"
