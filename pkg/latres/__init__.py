"""Resection and insertion calculus for slim semimodular lattice diagrams."""

__version__ = "0.1.0"
