"""Exact integral verification toolkit for Kostant slices and the adjoint quotient."""

__version__ = "0.1.0"
