"""Even, odd and unified Khovanov homology with Bockstein operations and
their integral lifts."""

from .diagram import (LinkDiagram, parse_pd, mirror, disjoint_union, connected_sum,
                      braid_closure, torus_knot, unknot)
from .cube import ResolutionCube, build_cube
from .complex import UnifiedComplex, build_unified, reduce, unified_complex
from .homalg import Group, HomologyTable, homology
from .operations import Engine, OperationMap, RankTable
from .census import InvariantRecord, PairReport, ComplexCache, find_pairs

__all__ = [
    "LinkDiagram", "parse_pd", "mirror", "disjoint_union", "connected_sum", "braid_closure",
    "torus_knot", "unknot", "ResolutionCube", "build_cube", "UnifiedComplex", "build_unified",
    "reduce", "unified_complex", "Group", "HomologyTable", "homology", "Engine", "OperationMap",
    "RankTable", "InvariantRecord", "PairReport", "ComplexCache", "find_pairs",
]
