"""Exact equivariant p-adic algebra: group rings, Iwasawa series, Fitting ideals and L-values."""

__version__ = "0.1.0"
