"""Riesz and Bessel potential kernels with numerical verification tools."""

from ._backend import NAME as BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
