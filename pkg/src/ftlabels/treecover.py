"""Sparse tree covers over the light subgraph G minus H_i.

Scale ``i`` works in ``G_i = G - H_i`` where ``H_i`` holds the edges of weight
at least ``2**i``.  Clusters come from Awerbuch-Peleg style coarsening of the
balls ``B_{2^i}(v)``, and each cluster is spanned by a shortest-path tree from
its center inside the induced subgraph.  The three cover properties are
checked after construction rather than taken on trust.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, field

from .errors import PropertyViolation
from .graph import Graph, SpanningTree
from .oracle import dijkstra

OVERLAP_C = 2  # overlap budget is OVERLAP_C * k * n**(1/k)


def light(g: Graph, i: int):
    """Predicate on edge indices: kept at scale ``i`` (weight below 2**i)."""
    cap = 1 << i
    return lambda idx: g.edges[idx].w < cap


def light_edges_within(g: Graph, i: int, verts) -> list[int]:
    """Edge indices of ``(G - H_i)[verts]``."""
    cap = 1 << i
    vs = verts if isinstance(verts, (set, frozenset)) else set(verts)
    out = []
    for idx, e in enumerate(g.edges):
        if e.w < cap and e.u in vs and e.v in vs:
            out.append(idx)
    return out


def ball(g: Graph, v: int, i: int) -> frozenset[int]:
    return frozenset(dijkstra(g, v, allowed=light(g, i), limit=1 << i))


def sp_tree(g: Graph, root: int, verts, allowed) -> tuple[SpanningTree, dict[int, float]]:
    """Shortest-path tree from ``root`` inside the subgraph induced on ``verts``.

    Ties go to the smaller predecessor id so the tree is reproducible.
    """
    dist = {root: 0}
    parent: dict[int, tuple[int, int] | None] = {root: None}
    done = set()
    heap = [(0, root)]
    while heap:
        d, x = heapq.heappop(heap)
        if x in done:
            continue
        done.add(x)
        for y, idx in g.adj[x]:
            if y not in verts or y in done or not allowed(idx):
                continue
            nd = d + g.edges[idx].w
            old = dist.get(y)
            if old is None or nd < old or (nd == old and x < parent[y][0]):
                dist[y] = nd
                parent[y] = (x, idx)
                heapq.heappush(heap, (nd, y))
    return SpanningTree.from_parents(root, parent), dist


@dataclass
class TreeCover:
    scale: int
    k: int
    trees: list[SpanningTree]
    centers: list[int]
    radii: list[float]
    home: dict[int, int]  # i*(v): first tree holding the whole ball of v
    members: dict[int, list[int]] = field(default_factory=dict)  # v -> trees containing v

    @property
    def rho(self) -> int:
        return 1 << self.scale

    def overlap(self) -> int:
        return max((len(ts) for ts in self.members.values()), default=0)

    def overlap_budget(self, n: int) -> float:
        return OVERLAP_C * self.k * n ** (1 / self.k)


def _clusters(balls: dict[int, frozenset[int]], k: int, order: list[int]) -> list[tuple[int, set[int]]]:
    """Coarsen the balls into clusters; returns (center, vertex set) pairs."""
    remaining = list(order)  # centers whose ball is not yet inside an output cluster
    out = []
    while remaining:
        rate = len(remaining) ** (1 / k)
        pool = list(remaining)
        covered = set()
        while pool:
            seed = pool[0]
            kernel = [seed]
            grown = set(balls[seed])
            while True:
                zone = [c for c in pool if not grown.isdisjoint(balls[c])]
                if len(zone) <= rate * len(kernel):
                    break
                kernel = zone
                grown = set().union(*(balls[c] for c in kernel))
            out.append((seed, grown))
            covered.update(kernel)
            gone = set(zone)
            pool = [c for c in pool if c not in gone]
        remaining = [c for c in remaining if c not in covered]
    return out


def build_tree_cover(g: Graph, k: int, i: int, seed: int = 0, verify: bool = True) -> TreeCover:
    """Tree cover TC(G - H_i, w, 2**i, k)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    allowed = light(g, i)
    balls = {v: ball(g, v, i) for v in g.vertices}
    order = list(g.vertices)
    random.Random(f"cover:{seed}:{i}").shuffle(order)
    trees, centers, radii = [], [], []
    for center, verts in _clusters(balls, k, order):
        t, dist = sp_tree(g, center, verts, allowed)
        if t.size != len(verts):
            raise PropertyViolation(f"cluster around {center} is not connected at scale {i}")
        trees.append(t)
        centers.append(center)
        radii.append(max(dist.values()))
    members: dict[int, list[int]] = {v: [] for v in g.vertices}
    for j, t in enumerate(trees):
        for v in t.vertices:
            members[v].append(j)
    home = {}
    for v in g.vertices:
        for j in members[v]:
            if balls[v] <= trees[j].dfs_in.keys():
                home[v] = j
                break
    tc = TreeCover(i, k, trees, centers, radii, home, members)
    if verify:
        verify_tree_cover(g, tc, balls)
    return tc


def tree_radius(g: Graph, t: SpanningTree) -> float:
    """Largest root-to-vertex distance measured along tree edges."""
    dist = {t.root: 0}
    for v in sorted(t.vertices, key=t.depth.__getitem__):
        pe = t.parent[v]
        if pe is not None:
            dist[v] = dist[pe[0]] + g.edges[pe[1]].w
    return max(dist.values())


def verify_tree_cover(g: Graph, tc: TreeCover, balls: dict[int, frozenset[int]] | None = None) -> None:
    """Raise PropertyViolation unless coverage, radius and overlap all hold."""
    i, k = tc.scale, tc.k
    if balls is None:
        balls = {v: ball(g, v, i) for v in g.vertices}
    for v in g.vertices:
        j = tc.home.get(v)
        if j is None or not balls[v] <= tc.trees[j].dfs_in.keys():
            raise PropertyViolation(f"ball of {v} at scale {i} is in no tree")
    cap = 1 << i
    for j, t in enumerate(tc.trees):
        for idx in t.tree_edges:
            if g.edges[idx].w >= cap:
                raise PropertyViolation(f"tree {j} at scale {i} uses a heavy edge")
        r = tree_radius(g, t)
        if r > (2 * k - 1) * cap:
            raise PropertyViolation(f"tree {j} at scale {i} has radius {r} > {(2 * k - 1) * cap}")
    if tc.overlap() > tc.overlap_budget(g.n):
        raise PropertyViolation(
            f"a vertex sits in {tc.overlap()} trees at scale {i}, budget {tc.overlap_budget(g.n):.1f}"
        )


def num_scales(n: int, max_weight: int) -> int:
    """K = ceil(log2(n W)) + 1 scales, enough for every finite distance."""
    return math.ceil(math.log2(max(n * max_weight, 2))) + 1
