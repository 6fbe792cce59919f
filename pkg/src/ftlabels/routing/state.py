"""Preprocessing for the routing schemes: per-tree instances, labels, tables.

Every tree ``T_{i,j}`` of every scale carries ``f + 1`` copies of the sketch
labels of ``G_{i,j}``.  The copies share the identifier seed, so extended edge
identifiers and vertex labels agree across them; only the sampling seed
differs.  Sketches are expensive, so a copy is materialised the first time
any label of it is read and kept in a small LRU cache.  Sizes are computed
from the fixed field widths and never need the sketches themselves.
"""

from __future__ import annotations

import random
from collections import OrderedDict
from dataclasses import dataclass, field

from ..errors import MissingLabel
from ..graph import Graph, SpanningTree
from ..sampling import SeedPair, digest_tag
from ..sketch import (
    ExtendedEdgeId,
    SketchEdgeLabel,
    SketchParams,
    SketchVertexLabel,
    assign_sketch_labels,
    edge_label_bits,
    make_eid,
    stamp_bits,
    vertex_label_bits,
)
from ..treecover import TreeCover, build_tree_cover, light_edges_within, num_scales
from .tree import (
    TreeLabelCodec,
    TreeRoutingLabel,
    TreeRoutingTable,
    gamma_set,
    split_route_extra,
    tree_routing_scheme,
)


@dataclass
class RouteInstance:
    """One tree of one scale with everything needed to label ``G_{i,j}``."""

    i: int
    j: int
    tree: SpanningTree
    edges: list[int]
    seed_id: int
    seed_hs: tuple[int, ...]
    params: SketchParams
    tag: int
    codec: TreeLabelCodec
    tlabels: dict[int, TreeRoutingLabel] = field(repr=False)
    ttables: dict[int, TreeRoutingTable] = field(repr=False)
    holders: dict[int, tuple[int, ...]] = field(repr=False)  # tree edge -> Gamma set

    def seeds(self, copy: int) -> SeedPair:
        return SeedPair(self.seed_id, self.seed_hs[copy - 1])

    def edge_extra(self, g: Graph, idx: int) -> int:
        """Routing payload of an edge: both ports and both tree labels, in id order."""
        e = g.edges[idx]
        a, b = (e.u, e.v) if e.u < e.v else (e.v, e.u)
        pw, cw = self.codec.pw, self.codec.width
        x = g.port(a, b) | (g.port(b, a) << pw)
        x |= self.codec.pack(self.tlabels[a]) << (2 * pw)
        x |= self.codec.pack(self.tlabels[b]) << (2 * pw + cw)
        return x

    def split_extra(self, x: int) -> tuple[int, int, TreeRoutingLabel, TreeRoutingLabel]:
        return split_route_extra(self.codec, x)

    def vertex_label(self, v: int) -> SketchVertexLabel:
        return SketchVertexLabel(self.tree.anc(v), v, self.tag, self.tlabels[v])


@dataclass(frozen=True)
class NonTreeRouteLabel:
    """Route label of a non-tree edge: its extended identifier, valid in every copy."""

    eid: ExtendedEdgeId
    params: SketchParams
    tag: int

    def copy(self, ell: int) -> SketchEdgeLabel:
        return SketchEdgeLabel(self.eid, False, None, self.params, self.tag)

    def bits(self) -> int:
        return self.params.width

    @property
    def key(self) -> tuple[int, int]:
        return (self.eid.id_u, self.eid.id_v)


@dataclass(frozen=True)
class TreeRouteLabel:
    """Route label of a tree edge: its connectivity label in all f + 1 copies.

    The copies are fetched from the owning state on first use.
    """

    state: "RoutingState" = field(repr=False, compare=False)
    i: int
    j: int
    idx: int
    key: tuple[int, int]

    def copy(self, ell: int) -> SketchEdgeLabel:
        return self.state.copy_labels(self.i, self.j, ell)[1][self.idx]

    def bits(self) -> int:
        inst = self.state.instances[(self.i, self.j)]
        return len(inst.seed_hs) * edge_label_bits(inst.params, True)


@dataclass
class TableEntry:
    conn: SketchVertexLabel  # copy-independent vertex label
    tree: TreeRoutingTable
    stored: dict[tuple[int, int], TreeRouteLabel]
    params: SketchParams
    tag: int
    codec: TreeLabelCodec


@dataclass
class RoutingTable:
    vid: int
    entries: dict[tuple[int, int], TableEntry]

    def edge_label(self, i: int, j: int, key: tuple[int, int]) -> TreeRouteLabel:
        ent = self.entries.get((i, j))
        if ent is None or key not in ent.stored:
            raise MissingLabel(f"vertex {self.vid} holds no label of {key} in tree ({i},{j})")
        return ent.stored[key]


@dataclass(frozen=True)
class RoutingLabel:
    """Per scale: the home tree index and the vertex label inside it."""

    vid: int
    home: tuple[int, ...]
    conn: tuple[SketchVertexLabel, ...]


@dataclass(frozen=True)
class KnownVertexLabel:
    """Vertex label for routing around known faults: every tree, copy 1."""

    vid: int
    home: tuple[int, ...]
    entries: dict[tuple[int, int], SketchVertexLabel] = field(repr=False)

    def at(self, i: int, j: int) -> SketchVertexLabel | None:
        return self.entries.get((i, j))


@dataclass(frozen=True)
class KnownEdgeLabel:
    state: "RoutingState" = field(repr=False, compare=False)
    idx: int
    trees: tuple[tuple[int, int], ...]

    def at(self, i: int, j: int) -> SketchEdgeLabel | None:
        if (i, j) not in self.trees:
            return None
        return self.state.copy_labels(i, j, 1)[1][self.idx]


class RoutingState:
    def __init__(self, g: Graph, f: int, k: int, seed: int = 0, cache: int = 48):
        if f < 0 or k < 1:
            raise ValueError("need f >= 0 and k >= 1")
        self.g = g
        self.f = f
        self.k = k
        self.seed = seed
        self.scales = num_scales(g.n, g.max_weight)
        self.covers: list[TreeCover] = []
        self.instances: dict[tuple[int, int], RouteInstance] = {}
        self.member: dict[int, list[tuple[int, int]]] = {v: [] for v in g.vertices}
        self.edge_trees: dict[int, list[tuple[int, int]]] = {idx: [] for idx in range(g.m)}
        self._cache: OrderedDict = OrderedDict()
        self._cache_size = cache
        self.materialized = 0
        stamp = stamp_bits(g.n)
        for i in range(1, self.scales + 1):
            tc = build_tree_cover(g, k, i, seed)
            self.covers.append(tc)
            for j, t in enumerate(tc.trees):
                edges = light_edges_within(g, i, t.dfs_in.keys())
                rng = random.Random(f"route:{seed}:{i}:{j}")
                seed_id = rng.getrandbits(64)
                seed_hs = tuple(rng.getrandbits(64) for _ in range(f + 1))
                tl, tt = tree_routing_scheme(g, t, f)
                codec = TreeLabelCodec.for_tree(g, tl, stamp, f)
                params = SketchParams.for_graph(g.n, len(edges), extra_bits=2 * codec.pw + 2 * codec.width)
                tag = digest_tag("route", seed, seed_id, params, i, j, t.root, t.size)
                holders = {}
                for v in t.vertices:
                    pe = t.parent[v]
                    if pe is not None:
                        holders[pe[1]] = gamma_set(t, v, f)
                inst = RouteInstance(i, j, t, edges, seed_id, seed_hs, params, tag, codec, tl, tt, holders)
                self.instances[(i, j)] = inst
                for v in t.vertices:
                    self.member[v].append((i, j))
                for idx in edges:
                    self.edge_trees[idx].append((i, j))
        self.home = {v: tuple(c.home[v] for c in self.covers) for v in g.vertices}
        self._tables: dict[int, RoutingTable] = {}

    # -- copies ----------------------------------------------------------------

    def copy_labels(self, i: int, j: int, ell: int):
        """Sketch labels of copy ``ell`` (1-based) of tree ``(i, j)``."""
        key = (i, j, ell)
        hit = self._cache.get(key)
        if hit is not None:
            self._cache.move_to_end(key)
            return hit
        inst = self.instances[(i, j)]
        if not 1 <= ell <= len(inst.seed_hs):
            raise MissingLabel(f"copy {ell} outside 1..{len(inst.seed_hs)}")
        out = assign_sketch_labels(
            self.g,
            inst.tree,
            inst.seeds(ell),
            edges=inst.edges,
            n=self.g.n,
            extra_bits=inst.params.extra_bits,
            edge_extra=lambda idx: inst.edge_extra(self.g, idx),
            vertex_extra=inst.tlabels.__getitem__,
            instance=inst.tag,
        )
        self.materialized += 1
        self._cache[key] = out
        if len(self._cache) > self._cache_size:
            self._cache.popitem(last=False)
        return out

    # -- labels and tables -----------------------------------------------------

    def routing_label(self, v: int) -> RoutingLabel:
        home = self.home[v]
        conn = tuple(self.instances[(i, home[i - 1])].vertex_label(v) for i in range(1, self.scales + 1))
        return RoutingLabel(v, home, conn)

    def edge_route_label(self, i: int, j: int, idx: int) -> TreeRouteLabel | NonTreeRouteLabel:
        inst = self.instances[(i, j)]
        e = self.g.edges[idx]
        if inst.tree.is_tree_edge(idx):
            return TreeRouteLabel(self, i, j, idx, e.key)
        t = inst.tree
        eid = make_eid(inst.seed_id, inst.params, e.u, e.v, t.anc(e.u), t.anc(e.v), inst.edge_extra(self.g, idx))
        return NonTreeRouteLabel(eid, inst.params, inst.tag)

    def table(self, v: int) -> RoutingTable:
        tab = self._tables.get(v)
        if tab is not None:
            return tab
        entries = {}
        for i, j in self.member[v]:
            inst = self.instances[(i, j)]
            stored = {}
            for idx, hold in inst.holders.items():
                if v in hold:
                    e = self.g.edges[idx]
                    stored[e.key] = TreeRouteLabel(self, i, j, idx, e.key)
            entries[(i, j)] = TableEntry(
                inst.vertex_label(v), inst.ttables[v], stored, inst.params, inst.tag, inst.codec
            )
        tab = RoutingTable(v, entries)
        self._tables[v] = tab
        return tab

    def known_vertex_label(self, v: int) -> KnownVertexLabel:
        return KnownVertexLabel(
            v, self.home[v], {ij: self.instances[ij].vertex_label(v) for ij in self.member[v]}
        )

    def known_edge_label(self, idx: int) -> KnownEdgeLabel:
        return KnownEdgeLabel(self, idx, tuple(self.edge_trees[idx]))

    # -- sizes -----------------------------------------------------------------

    def table_bits(self, v: int) -> int:
        """Measured table size of ``v`` from the fixed field widths."""
        total = 0
        for i, j in self.member[v]:
            inst = self.instances[(i, j)]
            nstored = sum(1 for hold in inst.holders.values() if v in hold)
            per_edge = len(inst.seed_hs) * edge_label_bits(inst.params, True)
            total += nstored * per_edge
            total += vertex_label_bits(inst.params, inst.codec.width) + inst.codec.table_bits()
            total += self._index_bits()
        return total

    def label_bits(self, v: int) -> int:
        total = 0
        for i in range(1, self.scales + 1):
            inst = self.instances[(i, self.home[v][i - 1])]
            total += self._index_bits() + vertex_label_bits(inst.params, inst.codec.width)
        return total

    def header_budget(self, i: int, j: int) -> int:
        """Largest header the scheme may build in tree ``(i, j)``.

        Up to 2f + 1 path segments, f tree-edge route labels of f + 1 copies
        each, the tree index and the cursor.
        """
        inst = self.instances[(i, j)]
        seg = 1 + max(2 * inst.codec.width, inst.params.width)
        lab = len(inst.seed_hs) * edge_label_bits(inst.params, True)
        return (2 * self.f + 1) * seg + self.f * lab + self._index_bits() + 2 * (2 * self.f + 2).bit_length() + 1

    def _index_bits(self) -> int:
        trees = max(len(c.trees) for c in self.covers)
        return max(1, self.scales.bit_length()) + max(1, trees.bit_length())

    def max_stored_per_tree(self) -> int:
        worst = 0
        for (i, j), inst in self.instances.items():
            counts: dict[int, int] = {}
            for hold in inst.holders.values():
                for v in hold:
                    counts[v] = counts.get(v, 0) + 1
            worst = max(worst, max(counts.values(), default=0))
        return worst


def build_routing_state(g: Graph, f: int, k: int, seed: int = 0) -> RoutingState:
    return RoutingState(g, f, k, seed)
