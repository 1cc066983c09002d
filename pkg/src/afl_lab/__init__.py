"""Exact lattice-counting computations of p-adic orbital integrals for U(n)xU(n)."""

from afl_lab.field import ArithContext, FieldElement, context

__version__ = "0.1.0"

__all__ = ["ArithContext", "FieldElement", "context", "__version__"]
