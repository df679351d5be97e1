"""Exact solvers, kernels and generators for Two-Sets Cut-Uncut and
2-Disjoint Connected Subgraphs."""

from .core import (
    Check,
    Graph,
    Instance,
    ParseError,
    SolutionCut,
    TscuError,
    Verdict,
    normalize,
    parse_instance,
    serialize_instance,
    verify_solution,
)

__version__ = "0.1.0"

__all__ = [
    "Check",
    "Graph",
    "Instance",
    "ParseError",
    "SolutionCut",
    "TscuError",
    "Verdict",
    "normalize",
    "parse_instance",
    "serialize_instance",
    "verify_solution",
]
