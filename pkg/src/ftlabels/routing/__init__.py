"""Forbidden-set and fault-tolerant routing over tree covers."""

from .simulator import (
    MessageHeader,
    Network,
    RouteTrace,
    decide,
    measure_stretch,
    route_known,
    route_unknown,
)
from .state import RoutingState, build_routing_state
from .tree import gamma_set, next_hop, tree_routing_scheme

__all__ = [
    "MessageHeader",
    "Network",
    "RouteTrace",
    "RoutingState",
    "build_routing_state",
    "decide",
    "gamma_set",
    "measure_stretch",
    "next_hop",
    "route_known",
    "route_unknown",
    "tree_routing_scheme",
]
