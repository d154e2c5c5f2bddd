"""Verification kernel for noncommutative Hamiltonian mechanics."""

__version__ = "0.1.0"
