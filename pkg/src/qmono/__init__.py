"""Monogamy of bipartite quantum correlations on few-qubit states."""

__version__ = "0.1.0"
