"""Linear-programming capacity bounds for ad hoc and hybrid wireless networks."""

__version__ = "0.1.0"

from .capacity import CapacityModelError, CapacityReport, build_lp, evaluate
from .interference import FreqTable, estimate_freq, exact_freq, freq_table
from .lp import LinearProgram, read_lp, write_lp
from .routing import (
    Backbone,
    Route,
    RouteSet,
    backbone_routes,
    load_routes,
    overhead_model,
    shortest_routes,
    wu_li_backbone,
)
from .solver import Solution, solve, verify
from .topology import (
    ConflictGraph,
    Topology,
    conflict_graph,
    generate_unit_disk,
    k_neighborhood,
    line_topology,
    linegraph,
    read_topology,
)

__all__ = [
    "Backbone", "CapacityModelError", "CapacityReport", "ConflictGraph", "FreqTable",
    "LinearProgram", "Route", "RouteSet", "Solution", "Topology",
    "backbone_routes", "build_lp", "conflict_graph", "estimate_freq", "evaluate",
    "exact_freq", "freq_table", "generate_unit_disk", "k_neighborhood", "line_topology",
    "linegraph", "load_routes", "overhead_model", "read_lp", "read_topology",
    "shortest_routes", "solve", "verify", "write_lp", "wu_li_backbone",
]
