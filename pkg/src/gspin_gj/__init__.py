"""Exact local unramified computations for GSpin Godement-Jacquet integrals."""

__version__ = "0.1.0"
