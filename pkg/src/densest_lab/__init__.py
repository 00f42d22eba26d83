"""Exact and approximate densest-subgraph solvers with executable DkS/DALkS reductions."""

__version__ = "0.1.0"
