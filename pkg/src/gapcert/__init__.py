"""Exact arithmetic for matrices over group rings, cochain Laplacians and SOS gap certificates."""

__version__ = "0.1.0"
