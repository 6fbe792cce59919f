"""Approximate distance labels under edge faults.

For every scale ``i`` and every tree ``T_{i,j}`` of the scale-``i`` cover the
sketch scheme is applied to ``G_{i,j}``, the light edges of G induced on
``V(T_{i,j})``.  A query walks the scales upward inside the tree that holds
the ball of ``s`` and stops at the first scale where ``s`` and ``t`` stay
connected.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Sequence

from .decode import FaultSetSketchDecoder, SuccinctPath
from .errors import MixedInstance, TooManyFaults
from .graph import Graph
from .sampling import SeedPair, digest_tag
from .sketch import (
    SketchEdgeLabel,
    SketchParams,
    SketchVertexLabel,
    assign_sketch_labels,
    vertex_label_bits,
)
from .treecover import TreeCover, build_tree_cover, light_edges_within, num_scales

INF = math.inf


def instance_seeds(seed: int, i: int, j: int, tag: str = "dist") -> SeedPair:
    rng = random.Random(f"{tag}:{seed}:{i}:{j}")
    return SeedPair(rng.getrandbits(64), rng.getrandbits(64))


def _index_bits(K: int, trees: int) -> int:
    return max(1, K.bit_length()) + max(1, trees.bit_length())


@dataclass(frozen=True)
class DistVertexLabel:
    vid: int
    k: int
    home: tuple[int, ...]  # home[i - 1] = i*(v)
    entries: tuple[tuple[int, int, SketchVertexLabel], ...] = field(repr=False)
    scheme: int = 0

    @property
    def scales(self) -> int:
        return len(self.home)

    def at(self, i: int, j: int) -> SketchVertexLabel | None:
        pos = bisect_left(self.entries, (i, j), key=lambda e: (e[0], e[1]))
        if pos < len(self.entries) and self.entries[pos][:2] == (i, j):
            return self.entries[pos][2]
        return None


@dataclass(frozen=True)
class DistEdgeLabel:
    u: int
    v: int
    entries: tuple[tuple[int, int, SketchEdgeLabel], ...] = field(repr=False)
    scheme: int = 0

    def at(self, i: int, j: int) -> SketchEdgeLabel | None:
        pos = bisect_left(self.entries, (i, j), key=lambda e: (e[0], e[1]))
        if pos < len(self.entries) and self.entries[pos][:2] == (i, j):
            return self.entries[pos][2]
        return None

    def bits(self, scales: int, max_trees: int) -> int:
        idx = _index_bits(scales, max_trees)
        return sum(idx + lab.bits() for _, _, lab in self.entries)


@dataclass
class DistanceEstimate:
    value: float
    scale: int | None = None
    tree: int | None = None
    path: SuccinctPath | None = field(default=None, repr=False)

    @property
    def finite(self) -> bool:
        return self.value != INF


@dataclass
class DistanceLabeling:
    """Everything the labeling pass produced, kept for reports and tests."""

    f: int
    k: int
    scales: int
    covers: list[TreeCover]
    vertex: dict[int, DistVertexLabel]
    edge: dict[int, DistEdgeLabel]
    instance_edges: dict[tuple[int, int], list[int]] = field(repr=False)
    params: dict[int, SketchParams] = field(repr=False, default_factory=dict)

    @property
    def max_trees(self) -> int:
        return max(len(c.trees) for c in self.covers)

    def vertex_bits(self, v: int) -> int:
        """Measured vertex label length: one sketch vertex label per tree, the
        (i, j) tags, and the home index of every scale."""
        lab = self.vertex[v]
        idx = _index_bits(self.scales, self.max_trees)
        total = self.scales * max(1, self.max_trees.bit_length())
        for _, _, sv in lab.entries:
            total += idx + vertex_label_bits(self.params[sv.instance])
        return total

    def edge_bits(self, idx: int) -> int:
        return self.edge[idx].bits(self.scales, self.max_trees)

    def bound(self, n: int, s_bits: int) -> float:
        """Closed form s * k * n^(1/k) * log(nW) for a connectivity label of s bits."""
        return s_bits * self.k * n ** (1 / self.k) * self.scales


def assign_dist_labels(g: Graph, f: int, k: int, seed: int = 0) -> DistanceLabeling:
    """Labels for every vertex and edge of ``g``."""
    if f < 0 or k < 1:
        raise ValueError("need f >= 0 and k >= 1")
    K = num_scales(g.n, g.max_weight)
    scheme = digest_tag("dist", seed, f, k, K, g.n, g.m)
    covers = []
    ventries: dict[int, list] = {v: [] for v in g.vertices}
    eentries: dict[int, list] = {idx: [] for idx in range(g.m)}
    inst_edges = {}
    params = {}
    for i in range(1, K + 1):
        tc = build_tree_cover(g, k, i, seed)
        covers.append(tc)
        for j, t in enumerate(tc.trees):
            edges = light_edges_within(g, i, t.dfs_in.keys())
            inst_edges[(i, j)] = edges
            vl, el = assign_sketch_labels(g, t, instance_seeds(seed, i, j), edges=edges, n=g.n)
            for v, lab in vl.items():
                ventries[v].append((i, j, lab))
            for idx, lab in el.items():
                eentries[idx].append((i, j, lab))
            some = next(iter(vl.values()))
            params[some.instance] = SketchParams.for_graph(g.n, len(edges))
    vertex = {
        v: DistVertexLabel(v, k, tuple(c.home[v] for c in covers), tuple(sorted(ventries[v], key=_ij)), scheme)
        for v in g.vertices
    }
    edge = {
        idx: DistEdgeLabel(g.edges[idx].u, g.edges[idx].v, tuple(sorted(eentries[idx], key=_ij)), scheme)
        for idx in range(g.m)
    }
    return DistanceLabeling(f, k, K, covers, vertex, edge, inst_edges, params)


def _ij(e):
    return (e[0], e[1])


def dist_decode(
    ls: DistVertexLabel,
    lt: DistVertexLabel,
    lf: Sequence[DistEdgeLabel],
    f: int | None = None,
    want_path: bool = False,
) -> DistanceEstimate:
    """Estimate dist(s, t) in G minus F from the labels of s, t and F."""
    faults = list({(l.u, l.v): l for l in lf}.values())
    if f is not None and len(faults) > f:
        raise TooManyFaults(f"{len(faults)} faults, scheme tolerates {f}")
    if len({ls.scheme, lt.scheme} | {l.scheme for l in faults}) > 1:
        raise MixedInstance("labels come from different distance labelings")
    if ls.vid == lt.vid:
        return DistanceEstimate(0, 0)
    k = ls.k
    for i in range(1, ls.scales + 1):
        j = ls.home[i - 1]
        sv = ls.at(i, j)
        tv = lt.at(i, j)
        if sv is None or tv is None:
            continue
        fi = [lab for lab in (l.at(i, j) for l in faults) if lab is not None]
        res = FaultSetSketchDecoder(fi).decode(sv, tv, want_path=want_path)
        if res.connected:
            return DistanceEstimate((4 * k - 1) * (len(faults) + 1) * (1 << i), i, j, res.path)
    return DistanceEstimate(INF)
