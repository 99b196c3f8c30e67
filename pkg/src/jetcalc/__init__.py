"""Exact symbolic calculus on finite-order jet bundles."""

from .errors import InputError, JetError, PreconditionError
from .expr import Expr, JetSpec, parse, render, total_derivative
from .multiindex import MultiIndex

__all__ = [
    "Expr",
    "InputError",
    "JetError",
    "JetSpec",
    "MultiIndex",
    "PreconditionError",
    "parse",
    "render",
    "total_derivative",
]
