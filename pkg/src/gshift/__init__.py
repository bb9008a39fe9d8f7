"""Invariant g-functions for one-sided subshifts, built from exact words and points."""

from .core import Point, metric
from .exitset import build_table, closure_meets_k, delta_plus, distance_to_exit, exit_set_closed, exit_witnesses
from .gfun import build_krieger, build_weighted, certify_property_g
from .subshift import DisjointFamilies, EvenShift, FiniteForbidden, SymbolRule, load_spec, parse_spec

__all__ = [
    "Point", "metric", "build_table", "closure_meets_k", "delta_plus", "distance_to_exit",
    "exit_set_closed", "exit_witnesses", "build_krieger", "build_weighted", "certify_property_g",
    "DisjointFamilies", "EvenShift", "FiniteForbidden", "SymbolRule", "load_spec", "parse_spec",
]
