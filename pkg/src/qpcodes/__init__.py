"""Perfect and quasi-perfect codes on Cartesian products of paths, cycles and small graphs."""

from .code_metrics import (
    INFINITE,
    Code,
    CodeReport,
    Label,
    check_claim,
    classify,
    covering_radius,
    distance_histogram,
    distance_to_code,
    min_pairwise_distance,
    sphere_packing_census,
)
from .product_graph import FactorSpec, ProductGraph, direct_sum, explicit_expand, parse_graph_spec
from .search import SearchSpec, min_code_size, search_code

__all__ = [
    "INFINITE",
    "Code",
    "CodeReport",
    "FactorSpec",
    "Label",
    "ProductGraph",
    "SearchSpec",
    "check_claim",
    "classify",
    "covering_radius",
    "direct_sum",
    "distance_histogram",
    "distance_to_code",
    "explicit_expand",
    "min_code_size",
    "min_pairwise_distance",
    "parse_graph_spec",
    "search_code",
    "sphere_packing_census",
]
