"""Scrambled-Halton QMC estimation of separable-state volumes for small bipartite systems."""

__version__ = "0.1.0"
