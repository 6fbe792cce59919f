"""Deterministic hop-by-hop simulation of both routing schemes.

The network owns the graph and the hidden faults.  A routing decision at
vertex ``u`` is computed by ``decide`` from three inputs only: the routing
table of ``u``, the message header and the label of the destination.  A
faulty link is only noticed when the message sits at one of its endpoints
and tries to use it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ..decode import FaultSetSketchDecoder, SuccinctPath
from ..errors import TooManyFaults, Undelivered
from ..graph import Graph
from ..oracle import oracle_distance
from .state import (
    KnownEdgeLabel,
    KnownVertexLabel,
    NonTreeRouteLabel,
    RoutingLabel,
    RoutingState,
    RoutingTable,
    TableEntry,
)
from .tree import Hop, TreeRoutingLabel, next_hop, split_route_extra


@dataclass(frozen=True)
class PathSeg:
    kind: int  # 1: tree path toward b, 0: the graph edge a-b
    a: int
    b: int
    a_label: TreeRoutingLabel | None = None
    b_label: TreeRoutingLabel | None = None
    port_ab: int | None = None
    port_ba: int | None = None


@dataclass
class MessageHeader:
    path: list[PathSeg]
    i: int
    j: int
    faults: list = field(default_factory=list)  # route labels of discovered faults
    q: int = 0
    reverse: bool = False
    pending: int = 0  # cursor step to apply once the chosen link is crossed
    eids: dict = field(default_factory=dict, repr=False)  # recovery edges by endpoint ids

    def bits(self, state: RoutingState) -> int:
        inst = state.instances[(self.i, self.j)]
        seg_bits = 0
        for s in self.path:
            seg_bits += 1 + (2 * inst.codec.width if s.kind == 1 else inst.params.width)
        cursor = 2 * (2 * state.f + 2).bit_length() + 1
        return seg_bits + sum(l.bits() for l in self.faults) + state._index_bits() + cursor


@dataclass(frozen=True)
class HopRecord:
    u: int
    port: int
    v: int
    w: int
    kind: str  # "fwd", "back" or "probe"


@dataclass
class RouteTrace:
    s: int
    t: int
    hops: list[HopRecord] = field(default_factory=list)
    delivered: bool = False
    discovered: list[tuple[int, int]] = field(default_factory=list)
    phases: list[dict] = field(default_factory=list)
    max_header_bits: int = 0
    error: str | None = None

    @property
    def weight(self) -> int:
        return sum(h.w for h in self.hops)

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "t": self.t,
            "delivered": self.delivered,
            "hops": len(self.hops),
            "weight": self.weight,
            "faults_discovered": [list(k) for k in self.discovered],
            "phases": self.phases,
        }


class Network:
    """Physical layer: links fail silently and are detected at an endpoint."""

    def __init__(self, state: RoutingState, faults: Sequence[int] = ()):
        self.state = state
        self._g = state.g
        self._dead = frozenset(faults)
        if len(self._dead) > state.f:
            raise TooManyFaults(f"{len(self._dead)} faults, scheme tolerates {state.f}")

    def table(self, u: int) -> RoutingTable:
        return self.state.table(u)

    def incident(self, u: int, port: int) -> tuple[int, int]:
        """What ``u`` knows about its own port: the neighbour id and the edge key."""
        v, idx = self._g.neighbor(u, port)
        return v, idx

    def cross(self, u: int, port: int) -> tuple[int, int] | None:
        """Send over a link; None if it is down."""
        v, idx = self._g.neighbor(u, port)
        if idx in self._dead:
            return None
        return v, self._g.edges[idx].w


# -- per-vertex decision -------------------------------------------------------


def decide(entry: TableEntry, h: MessageHeader) -> Hop | str:
    """Next hop out of the current vertex, or "arrived" / "home".

    Reads only the vertex's table entry for tree (h.i, h.j) and the header.
    """
    me = entry.tree.vid
    while True:
        if not h.reverse:
            if h.q >= len(h.path):
                return "arrived"
            seg = h.path[h.q]
            if seg.kind == 1:
                hop = next_hop(entry.tree, seg.b_label)
                if hop is None:
                    h.q += 1
                    continue
                h.pending = 0
                return hop
            if me != seg.a:
                raise AssertionError("message is off its succinct path")
            h.pending = 1
            return Hop(seg.port_ab, False, ())
        if h.q < 0:
            return "home"
        seg = h.path[h.q]
        if seg.kind == 1:
            hop = next_hop(entry.tree, seg.a_label)
            if hop is None:
                h.q -= 1
                continue
            h.pending = 0
            return hop
        if me != seg.b:
            raise AssertionError("message is off its succinct path on the way back")
        h.pending = -1
        return Hop(seg.port_ba, False, ())


def _walk(net: Network, s: int, h: MessageHeader, trace: RouteTrace, known: bool) -> str:
    """Carry the message until it arrives, returns to s, or (known faults) is blocked."""
    u = s
    while True:
        entry = net.table(u).entries[(h.i, h.j)]
        act = decide(entry, h)
        trace.max_header_bits = max(trace.max_header_bits, h.bits(net.state))
        if act == "arrived":
            return "arrived"
        if act == "home":
            return "home"
        res = net.cross(u, act.port)
        if res is not None:
            v, w = res
            trace.hops.append(HopRecord(u, act.port, v, w, "back" if h.reverse else "fwd"))
            h.q += h.pending
            h.pending = 0
            u = v
            continue
        if h.reverse or known:
            # a fault the header already excludes, or one met while backing up
            return "blocked"
        _discover(net, u, act, h, entry, trace)
        h.reverse = True
        if h.pending == 1:
            h.q -= 1  # the blocked graph edge was never entered
        h.pending = 0


def _discover(net: Network, u: int, hop: Hop, h: MessageHeader, entry: TableEntry, trace: RouteTrace) -> None:
    """Fetch the route label of the dead link behind ``hop.port`` into the header."""
    _, idx = net.incident(u, hop.port)
    key = net.state.g.edges[idx].key  # u knows the edge behind its own port
    trace.discovered.append(key)
    seg = h.path[h.q]
    if seg.kind == 0:
        eid = _seg_eid(h, seg)
        h.faults.append(NonTreeRouteLabel(eid, entry.params, entry.tag))
        return
    if key in entry.stored:
        h.faults.append(entry.stored[key])
        return
    for port in sorted(hop.gamma):
        res = net.cross(u, port)
        if res is None:
            continue
        w_id, w = res
        trace.hops.append(HopRecord(u, port, w_id, w, "probe"))
        lab = net.table(w_id).edge_label(h.i, h.j, key)
        trace.hops.append(HopRecord(w_id, net.state.g.port(w_id, u), u, w, "probe"))
        h.faults.append(lab)
        return
    raise AssertionError("every Gamma holder is cut off, so more than f links failed")


def _seg_eid(h: MessageHeader, seg: PathSeg):
    return h.eids[(min(seg.a, seg.b), max(seg.a, seg.b))]


def _build_header(
    path: SuccinctPath, entry: TableEntry, i: int, j: int, t_label: TreeRoutingLabel, faults
) -> MessageHeader:
    """Turn a decoded succinct path into header segments with routing data.

    Tree labels come from s, t and the extended identifiers of the recovery
    edges, the only sources the decoder has.
    """
    s_label = entry.conn.extra
    tl = {s_label.vid: s_label, t_label.vid: t_label}
    ports = {}
    eids = {}
    for eid in path.recovery_edges:
        p_uv, p_vu, lu, lv = split_route_extra(entry.codec, eid.extra)
        tl[eid.id_u] = lu
        tl[eid.id_v] = lv
        ports[(eid.id_u, eid.id_v)] = p_uv
        ports[(eid.id_v, eid.id_u)] = p_vu
        eids[(eid.id_u, eid.id_v)] = eid
    segs = []
    for sg in path.segments:
        if sg.kind == 1:
            segs.append(PathSeg(1, sg.a, sg.b, tl[sg.a], tl[sg.b]))
        else:
            segs.append(PathSeg(0, sg.a, sg.b, port_ab=ports[(sg.a, sg.b)], port_ba=ports[(sg.b, sg.a)]))
    return MessageHeader(segs, i, j, faults, eids=eids)


# -- the two schemes -------------------------------------------------------------


def route_known(
    net: Network,
    s: int,
    t_label: KnownVertexLabel,
    fault_labels: Sequence[KnownEdgeLabel],
    anchor: str = "s",
) -> RouteTrace:
    """Route around faults whose labels the source holds.

    Scans scales upward in the tree holding the ball of ``s`` (``anchor="s"``)
    or of ``t`` (``anchor="t"``).
    """
    st = net.state
    t = t_label.vid
    trace = RouteTrace(s, t)
    if s == t:
        trace.delivered = True
        return trace
    table = net.table(s)
    home = st.home[s] if anchor == "s" else t_label.home
    for i in range(1, st.scales + 1):
        j = home[i - 1]
        entry = table.entries.get((i, j))
        tv = t_label.at(i, j)
        if entry is None or tv is None:
            trace.phases.append({"scale": i, "tree": j, "result": "absent"})
            continue
        fi = [lab for lab in (l.at(i, j) for l in fault_labels) if lab is not None]
        res = FaultSetSketchDecoder(fi).decode(entry.conn, tv)
        if not res.connected:
            trace.phases.append({"scale": i, "tree": j, "result": "disconnected"})
            continue
        h = _build_header(res.path, entry, i, j, tv.extra, [])
        out = _walk(net, s, h, trace, known=True)
        trace.phases.append({"scale": i, "tree": j, "result": out})
        trace.delivered = out == "arrived"
        if out == "blocked":
            trace.error = "decoded path crosses a known fault"
        return trace
    return trace


def route_unknown(net: Network, s: int, t_label: RoutingLabel) -> RouteTrace:
    """Route with faults discovered only on arrival at their endpoints."""
    st = net.state
    t = t_label.vid
    trace = RouteTrace(s, t)
    if s == t:
        trace.delivered = True
        return trace
    table = net.table(s)
    copies = st.f + 1
    for i in range(1, st.scales + 1):
        j = t_label.home[i - 1]
        entry = table.entries.get((i, j))
        if entry is None:
            trace.phases.append({"scale": i, "tree": j, "result": "absent"})
            continue
        tv = t_label.conn[i - 1]
        known: list = []
        for ell in range(1, copies + 1):
            res = FaultSetSketchDecoder([l.copy(ell) for l in known]).decode(entry.conn, tv)
            if not res.connected:
                trace.phases.append({"scale": i, "tree": j, "iteration": ell, "result": "disconnected"})
                break
            h = _build_header(res.path, entry, i, j, tv.extra, known)
            out = _walk(net, s, h, trace, known=False)
            trace.phases.append({"scale": i, "tree": j, "iteration": ell, "result": out})
            if out == "arrived":
                trace.delivered = True
                return trace
            if out == "blocked":
                trace.error = "a link died under the message on its way back"
                return trace
            known = h.faults
        else:
            raise TooManyFaults("more than f faults discovered in one tree")
    return trace


def measure_stretch(trace: RouteTrace, g: Graph, F: Sequence[int]) -> Fraction:
    """Traversed weight over dist(s, t) in G minus F."""
    if not trace.delivered:
        raise Undelivered(f"message from {trace.s} never reached {trace.t}")
    d = oracle_distance(g, F, trace.s, trace.t)
    if d == 0:
        return Fraction(1)
    if d == math.inf:
        raise Undelivered("oracle says s and t are disconnected")
    return Fraction(trace.weight, int(d))
