"""Fault-tolerant connectivity labels, approximate distance labels and routing.

Two connectivity schemes answer "are s and t connected in G minus F?" from
the labels of s, t and the edges of F alone: ``cycle`` (cycle-space sampling,
f + O(log n) bits) and ``sketch`` (graph sketches, O(log^3 n) bits,
independent of f).  Tree covers lift the sketch scheme to distance labels
and to routing schemes that tolerate known or unknown link failures.
"""

from .cycle import assign_cycle_labels, cycle_decode
from .decode import sketch_decode
from .distance import assign_dist_labels, dist_decode
from .graph import Graph, build_graph, spanning_tree
from .oracle import make_fixture, oracle_connected, oracle_distance
from .sketch import assign_sketch_labels

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "assign_cycle_labels",
    "assign_dist_labels",
    "assign_sketch_labels",
    "build_graph",
    "cycle_decode",
    "dist_decode",
    "make_fixture",
    "oracle_connected",
    "oracle_distance",
    "sketch_decode",
    "spanning_tree",
]
