"""Subspace rotations compiled from topological quantum walks."""

__version__ = "0.1.0"
