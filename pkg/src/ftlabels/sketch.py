"""Graph sketches over extended edge identifiers and the sketch-based labels.

A sketch is ``L`` basic units, each a column of ``levels`` XOR cells.  The
whole thing is stored as one Python int (cell ``(i, j)`` occupies byte-aligned
slot ``i * levels + j``), so XOR of two sketches is a single ``^``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Iterable

from .errors import Disconnected
from .graph import AncestryLabel, Graph, SpanningTree
from .sampling import (
    HashFamily,
    SeedPair,
    default_units,
    derive_uid,
    digest_tag,
    edge_key,
    hash_family,
    uid_bits,
)


def stamp_bits(n: int) -> int:
    """Width of one DFS timestamp: 16 bits while ``2n`` fits, else 32."""
    return 16 if 2 * n < (1 << 16) else 32


@dataclass(frozen=True)
class SketchParams:
    n: int  # vertex ids are 1..n
    m: int  # edges in this instance
    units: int
    lam: int
    stamp: int
    extra_bits: int = 0

    @classmethod
    def for_graph(cls, n: int, m: int, units: int | None = None, lam: int | None = None,
                  extra_bits: int = 0) -> "SketchParams":
        return cls(
            n,
            m,
            default_units(n) if units is None else units,
            uid_bits(n) if lam is None else lam,
            stamp_bits(n),
            extra_bits,
        )

    @cached_property
    def idw(self) -> int:
        return max(1, self.n.bit_length())

    @cached_property
    def width(self) -> int:
        return self.lam + 2 * self.idw + 4 * self.stamp + self.extra_bits

    @cached_property
    def cell_bytes(self) -> int:
        return (self.width + 7) // 8

    @cached_property
    def family_levels(self) -> int:
        return max(self.m, 1).bit_length()

    @cached_property
    def unit_bytes(self) -> int:
        return self.family_levels * self.cell_bytes

    @cached_property
    def sketch_bytes(self) -> int:
        return self.units * self.unit_bytes

    @cached_property
    def unit_mask(self) -> int:
        return (1 << (8 * self.unit_bytes)) - 1

    def family(self, seed_h: int) -> HashFamily:
        return hash_family(seed_h, self.units, self.m)


@dataclass(frozen=True)
class ExtendedEdgeId:
    uid: int
    id_u: int
    id_v: int
    anc_u: AncestryLabel
    anc_v: AncestryLabel
    extra: int = 0

    def pack(self, p: SketchParams) -> int:
        x = self.extra
        for val, w in (
            (self.anc_v.dfs_out, p.stamp),
            (self.anc_v.dfs_in, p.stamp),
            (self.anc_u.dfs_out, p.stamp),
            (self.anc_u.dfs_in, p.stamp),
            (self.id_v, p.idw),
            (self.id_u, p.idw),
            (self.uid, p.lam),
        ):
            x = (x << w) | val
        return x

    @classmethod
    def unpack(cls, x: int, p: SketchParams) -> "ExtendedEdgeId":
        vals = []
        for w in (p.lam, p.idw, p.idw, p.stamp, p.stamp, p.stamp, p.stamp):
            vals.append(x & ((1 << w) - 1))
            x >>= w
        uid, a, b, ui, uo, vi, vo = vals
        return cls(uid, a, b, AncestryLabel(ui, uo), AncestryLabel(vi, vo), x)

    def key(self, n: int) -> int:
        return edge_key(self.id_u, self.id_v, n)


def make_eid(seed_id: int, p: SketchParams, id_u: int, id_v: int,
             anc_u: AncestryLabel, anc_v: AncestryLabel, extra: int = 0) -> ExtendedEdgeId:
    if id_u > id_v:
        id_u, id_v, anc_u, anc_v = id_v, id_u, anc_v, anc_u
    return ExtendedEdgeId(derive_uid(seed_id, id_u, id_v, p.lam), id_u, id_v, anc_u, anc_v, extra)


# -- sketch arithmetic -------------------------------------------------------


@lru_cache(maxsize=1024)
def edge_sketch(p: SketchParams, family: HashFamily, eid: ExtendedEdgeId) -> int:
    """Sketch contribution of one edge: its packed EID in every sampled cell."""
    cb = p.cell_bytes
    lv = p.family_levels
    word = eid.pack(p).to_bytes(cb, "little")
    buf = bytearray(p.sketch_bytes)
    for i, top in enumerate(family.top_levels(eid.key(p.n))):
        base = i * lv * cb
        for j in range(top + 1):
            pos = base + j * cb
            buf[pos : pos + cb] = word
    return int.from_bytes(buf, "little")


def unit_cells(sketch: int, p: SketchParams, i: int) -> list[int]:
    """Cells of basic unit ``i`` (0-based), level 0 first."""
    ub = p.unit_bytes
    cb = p.cell_bytes
    raw = ((sketch >> (8 * ub * i)) & p.unit_mask).to_bytes(ub, "little")
    return [int.from_bytes(raw[j : j + cb], "little") for j in range(0, ub, cb)]


def cell(sketch: int, p: SketchParams, i: int, j: int) -> int:
    cb = p.cell_bytes
    shift = 8 * ((i * p.family_levels + j) * cb)
    return (sketch >> shift) & ((1 << (8 * cb)) - 1)


def extract_outgoing_edge(cells: Iterable[int], p: SketchParams, seed_id: int) -> ExtendedEdgeId | None:
    """First cell that decodes to a single genuine edge identifier, if any."""
    for c in cells:
        if not c:
            continue
        eid = ExtendedEdgeId.unpack(c, p)
        if eid.extra >> p.extra_bits:
            continue
        if not 1 <= eid.id_u < eid.id_v <= p.n:
            continue
        if derive_uid(seed_id, eid.id_u, eid.id_v, p.lam) == eid.uid:
            return eid
    return None


# -- labels ------------------------------------------------------------------


@dataclass(frozen=True)
class SketchVertexLabel:
    anc: AncestryLabel
    vid: int
    instance: int
    extra: object = None


@dataclass(frozen=True)
class SketchEdgeLabel:
    eid: ExtendedEdgeId
    is_tree_edge: bool
    seeds: SeedPair
    params: SketchParams
    instance: int
    sketch_u: int | None = field(default=None, repr=False)
    sketch_v: int | None = field(default=None, repr=False)
    sketch_all: int | None = field(default=None, repr=False)

    def lower(self) -> tuple[AncestryLabel, int | None]:
        """Ancestry label and subtree sketch of the child endpoint of a tree edge."""
        e = self.eid
        if e.anc_u.dfs_in <= e.anc_v.dfs_in and e.anc_v.dfs_out <= e.anc_u.dfs_out:
            return e.anc_v, self.sketch_v
        return e.anc_u, self.sketch_u

    def lower_id(self) -> int:
        e = self.eid
        return e.id_v if self.lower()[0] == e.anc_v else e.id_u

    def bits(self) -> int:
        return edge_label_bits(self.params, self.is_tree_edge)


def instance_tag(seeds: SeedPair, p: SketchParams, root: int, vertices: int) -> int:
    return digest_tag("sketch", seeds.seed_id, seeds.seed_h, p, root, vertices)


def assign_sketch_labels(
    g: Graph,
    t: SpanningTree,
    seeds: SeedPair,
    edges: Iterable[int] | None = None,
    n: int | None = None,
    units: int | None = None,
    lam: int | None = None,
    extra_bits: int = 0,
    edge_extra: Callable[[int], int] | None = None,
    vertex_extra: Callable[[int], object] | None = None,
    instance: int | None = None,
) -> tuple[dict[int, SketchVertexLabel], dict[int, SketchEdgeLabel]]:
    """Vertex and edge labels for the instance ``(edges, t)``.

    ``edges`` defaults to every edge of ``g`` (then ``t`` must span ``g``).
    ``n`` is the size of the id universe, ``g.n`` by default; ``edge_extra``
    supplies the routing payload packed after the ancestry fields.  Passing
    ``instance`` fixes the instance tag, so copies that differ only in the
    sampling seed accept each other's labels.
    """
    if edges is None:
        if t.size != g.n:
            raise Disconnected([sorted(t.vertices)])
        edge_ids = list(range(g.m))
    else:
        edge_ids = sorted(edges)
    n = g.n if n is None else n
    p = SketchParams.for_graph(n, len(edge_ids), units, lam, extra_bits)
    fam = p.family(seeds.seed_h)
    tag = instance_tag(seeds, p, t.root, t.size) if instance is None else instance

    eids = {}
    acc = {v: 0 for v in t.vertices}
    for idx in edge_ids:
        e = g.edges[idx]
        extra = edge_extra(idx) if edge_extra is not None else 0
        eid = make_eid(seeds.seed_id, p, e.u, e.v, t.anc(e.u), t.anc(e.v), extra)
        eids[idx] = eid
        es = edge_sketch(p, fam, eid)
        acc[e.u] ^= es
        acc[e.v] ^= es

    # subtree sketches, children before parents
    sub = dict(acc)
    for x in sorted(t.vertices, key=t.dfs_in.__getitem__, reverse=True):
        par = t.parent_of(x)
        if par is not None:
            sub[par] ^= sub[x]
    total = sub[t.root]

    elabels = {}
    for idx in edge_ids:
        eid = eids[idx]
        if t.is_tree_edge(idx):
            elabels[idx] = SketchEdgeLabel(
                eid, True, seeds, p, tag, sub[eid.id_u], sub[eid.id_v], total
            )
        else:
            elabels[idx] = SketchEdgeLabel(eid, False, seeds, p, tag)
    vlabels = {
        v: SketchVertexLabel(t.anc(v), v, tag, vertex_extra(v) if vertex_extra else None)
        for v in t.vertices
    }
    return vlabels, elabels


def vertex_sketches(g: Graph, t: SpanningTree, seeds: SeedPair, p: SketchParams,
                    edges: Iterable[int] | None = None,
                    edge_extra: Callable[[int], int] | None = None) -> dict[int, int]:
    """Per-vertex sketches, recomputed from scratch (used for cross-checks)."""
    fam = p.family(seeds.seed_h)
    out = {v: 0 for v in t.vertices}
    for idx in (range(g.m) if edges is None else edges):
        e = g.edges[idx]
        extra = edge_extra(idx) if edge_extra is not None else 0
        es = edge_sketch(p, fam, make_eid(seeds.seed_id, p, e.u, e.v, t.anc(e.u), t.anc(e.v), extra))
        out[e.u] ^= es
        out[e.v] ^= es
    return out


def edge_label_bits(p: SketchParams, tree: bool) -> int:
    """Edge label length in bits, counting every stored field at its fixed width."""
    total = p.width + 1 + 2 * 64  # eid, tree flag, two seeds
    if tree:
        total += 3 * 8 * p.sketch_bytes
    return total


def vertex_label_bits(p: SketchParams, extra_bits: int = 0) -> int:
    return 2 * p.stamp + p.idw + extra_bits
