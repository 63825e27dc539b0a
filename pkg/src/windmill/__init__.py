"""Windability certificates, a Metropolis sampler on Holant instances, and
approximate counting of b-matchings and b-edge-covers."""

from .counter import CountEstimate, CountJob, count_b_edge_cover, count_b_matching, estimate_Z0
from .holant import HolantInstance, brute_Z, brute_Z_all, weighted_transform
from .symfunc import SymmetricFunction, make_named
from .windability import build_A, is_windable, solve_triangular

__all__ = [
    "SymmetricFunction",
    "make_named",
    "build_A",
    "solve_triangular",
    "is_windable",
    "HolantInstance",
    "brute_Z",
    "brute_Z_all",
    "weighted_transform",
    "CountJob",
    "CountEstimate",
    "estimate_Z0",
    "count_b_matching",
    "count_b_edge_cover",
]
