"""Frustrated-cluster-loop Ising benchmarks on Chimera graphs."""

__version__ = "0.1.0"
