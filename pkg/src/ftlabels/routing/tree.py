"""Heavy-light tree routing with the load-balancing sets Gamma_T(e).

A label lists the light edges on the root-to-vertex path, each with the
port at the parent and the parent's ports to the Gamma set of that edge.  A
table keeps the DFS range, the parent port and the heavy child's port with
its Gamma ports.  The next hop toward ``t`` is found from the table of the
current vertex and the label of ``t`` alone.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..graph import Graph, SpanningTree


@dataclass(frozen=True)
class LightHop:
    parent_in: int  # DFS entry time of the parent
    port: int  # parent's port to the light child
    gamma: tuple[int, ...]  # parent's ports to the other holders of the edge label


@dataclass(frozen=True)
class TreeRoutingLabel:
    vid: int
    dfs_in: int
    light: tuple[LightHop, ...]


@dataclass(frozen=True)
class TreeRoutingTable:
    vid: int
    dfs_in: int
    dfs_out: int
    parent_port: int | None
    heavy_port: int | None
    heavy_gamma: tuple[int, ...]
    keeps_child_edges: bool  # deg(v, T) <= f + 1, so v holds its child edge labels


@dataclass(frozen=True)
class Hop:
    port: int
    up: bool
    gamma: tuple[int, ...]  # ports to probe when the current vertex lacks the edge label


def gamma_set(t: SpanningTree, v: int, f: int) -> tuple[int, ...]:
    """Vertices storing the label of the tree edge from ``v`` to its parent."""
    u = t.parent_of(v)
    if u is None:
        raise ValueError(f"{v} is the root; it has no parent edge")
    if t.degree(u) <= f + 1:
        return (u, v)
    kids = t.children[u]  # ascending ids
    size = f + 1
    nblocks = max(1, len(kids) // size)
    q = min(kids.index(v) // size, nblocks - 1)
    return kids[q * size : (q + 1) * size if q < nblocks - 1 else len(kids)]


def heavy_children(t: SpanningTree) -> dict[int, int | None]:
    size = {}
    for v in sorted(t.vertices, key=t.depth.__getitem__, reverse=True):
        size[v] = 1 + sum(size[c] for c in t.children[v])
    return {
        v: (min(t.children[v], key=lambda c: (-size[c], c)) if t.children[v] else None)
        for v in t.vertices
    }


def tree_routing_scheme(g: Graph, t: SpanningTree, f: int) -> tuple[dict[int, TreeRoutingLabel], dict[int, TreeRoutingTable]]:
    heavy = heavy_children(t)

    def gamma_ports(v: int) -> tuple[int, ...]:
        u = t.parent_of(v)
        return tuple(sorted(g.port(u, w) for w in gamma_set(t, v, f) if w != u))

    labels: dict[int, TreeRoutingLabel] = {}
    for v in sorted(t.vertices, key=t.depth.__getitem__):
        u = t.parent_of(v)
        if u is None:
            labels[v] = TreeRoutingLabel(v, t.dfs_in[v], ())
            continue
        light = labels[u].light
        if heavy[u] != v:
            light = light + (LightHop(t.dfs_in[u], g.port(u, v), gamma_ports(v)),)
        labels[v] = TreeRoutingLabel(v, t.dfs_in[v], light)
    tables = {}
    for v in t.vertices:
        u = t.parent_of(v)
        h = heavy[v]
        tables[v] = TreeRoutingTable(
            v,
            t.dfs_in[v],
            t.dfs_out[v],
            None if u is None else g.port(v, u),
            None if h is None else g.port(v, h),
            () if h is None else gamma_ports(h),
            t.degree(v) <= f + 1,
        )
    return labels, tables


def next_hop(table: TreeRoutingTable, target: TreeRoutingLabel) -> Hop | None:
    """Port out of ``table.vid`` toward ``target``; None once there."""
    if target.vid == table.vid:
        return None
    if not table.dfs_in <= target.dfs_in <= table.dfs_out:
        return Hop(table.parent_port, True, ())
    for lh in target.light:
        if lh.parent_in == table.dfs_in:
            return Hop(lh.port, False, lh.gamma)
    return Hop(table.heavy_port, False, table.heavy_gamma)


# -- fixed-width packing, used inside extended edge identifiers ---------------


@dataclass(frozen=True)
class TreeLabelCodec:
    """Packs labels of one tree into ints of a fixed width (padded)."""

    idw: int
    stamp: int
    pw: int  # port width
    max_light: int
    max_gamma: int

    @classmethod
    def for_tree(cls, g: Graph, labels: dict[int, TreeRoutingLabel], stamp: int, f: int) -> "TreeLabelCodec":
        maxdeg = max((g.degree(v) for v in g.vertices), default=1)
        return cls(
            max(1, g.n.bit_length()),
            stamp,
            max(1, maxdeg.bit_length()),
            max((len(l.light) for l in labels.values()), default=0),
            2 * f + 1,
        )

    @property
    def cnt_bits(self) -> int:
        return max(1, self.max_light.bit_length())

    @property
    def gcnt_bits(self) -> int:
        return max(1, self.max_gamma.bit_length())

    @property
    def entry_bits(self) -> int:
        return self.stamp + self.pw + self.gcnt_bits + self.max_gamma * self.pw

    @property
    def width(self) -> int:
        return self.idw + self.stamp + self.cnt_bits + self.max_light * self.entry_bits

    def pack(self, lab: TreeRoutingLabel) -> int:
        fields = [(lab.vid, self.idw), (lab.dfs_in, self.stamp), (len(lab.light), self.cnt_bits)]
        for lh in lab.light:
            fields += [(lh.parent_in, self.stamp), (lh.port, self.pw), (len(lh.gamma), self.gcnt_bits)]
            fields += [(p, self.pw) for p in lh.gamma]
            fields += [(0, self.pw)] * (self.max_gamma - len(lh.gamma))
        x = 0
        shift = 0
        for val, w in fields:
            if val >> w:
                raise ValueError(f"value {val} does not fit in {w} bits")
            x |= val << shift
            shift += w
        return x

    def unpack(self, x: int) -> TreeRoutingLabel:
        def take(w):
            nonlocal x
            val = x & ((1 << w) - 1)
            x >>= w
            return val

        vid = take(self.idw)
        dfs_in = take(self.stamp)
        cnt = take(self.cnt_bits)
        light = []
        for _ in range(cnt):
            parent_in = take(self.stamp)
            port = take(self.pw)
            gc = take(self.gcnt_bits)
            ports = [take(self.pw) for _ in range(self.max_gamma)]
            light.append(LightHop(parent_in, port, tuple(ports[:gc])))
        return TreeRoutingLabel(vid, dfs_in, tuple(light))

    def table_bits(self) -> int:
        return 3 * self.stamp + self.idw + 2 * (self.pw + 1) + self.gcnt_bits + self.max_gamma * self.pw + 1


def split_route_extra(codec: TreeLabelCodec, x: int) -> tuple[int, int, TreeRoutingLabel, TreeRoutingLabel]:
    """Inverse of the routing payload packing: (port_uv, port_vu, L_T(u), L_T(v))."""
    pw, cw = codec.pw, codec.width
    mask = (1 << pw) - 1
    return (
        x & mask,
        (x >> pw) & mask,
        codec.unpack((x >> (2 * pw)) & ((1 << cw) - 1)),
        codec.unpack(x >> (2 * pw + cw)),
    )
