"""Brute-force ground truth and graph fixtures.

Every oracle has a second, independent implementation so the two can be
cross-checked: BFS against union-find for connectivity, Dijkstra against
Bellman-Ford for distances.  None of this code touches scheme seeds.
"""

from __future__ import annotations

import heapq
import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .errors import BadSpec
from .graph import Graph, build_graph

INF = math.inf


def _dead(F: Iterable[int]) -> set[int]:
    return F if isinstance(F, (set, frozenset)) else set(F)


def oracle_connected(g: Graph, F: Iterable[int], s: int, t: int) -> bool:
    """BFS in G minus the edge indices ``F``."""
    if s == t:
        return True
    dead = _dead(F)
    seen = {s}
    queue = deque([s])
    while queue:
        x = queue.popleft()
        for y, idx in g.adj[x]:
            if idx in dead or y in seen:
                continue
            if y == t:
                return True
            seen.add(y)
            queue.append(y)
    return False


class DisjointSets:
    def __init__(self, items: Iterable[int]):
        self.parent = {x: x for x in items}
        self.size = {x: 1 for x in self.parent}

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if self.size[ra] < self.size[rb] or (self.size[ra] == self.size[rb] and rb < ra):
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return ra


def component_ids(g: Graph, F: Iterable[int]) -> list[int]:
    """Union-find component id per vertex (index 0 unused)."""
    dead = _dead(F)
    ds = DisjointSets(g.vertices)
    for idx, e in enumerate(g.edges):
        if idx not in dead:
            ds.union(e.u, e.v)
    return [0] + [ds.find(v) for v in g.vertices]


def oracle_connected_uf(g: Graph, F: Iterable[int], s: int, t: int) -> bool:
    comp = component_ids(g, F)
    return comp[s] == comp[t]


def oracle_distance(g: Graph, F: Iterable[int], s: int, t: int) -> float:
    """Dijkstra in G minus ``F``; ``inf`` when disconnected."""
    return dijkstra(g, s, F).get(t, INF)


def dijkstra(
    g: Graph,
    s: int,
    F: Iterable[int] = (),
    allowed: Callable[[int], bool] | None = None,
    limit: float = INF,
) -> dict[int, float]:
    """Distances from ``s`` avoiding ``F``; optionally only over ``allowed`` edges
    and only up to distance ``limit``."""
    dead = _dead(F)
    dist = {s: 0}
    heap = [(0, s)]
    done = set()
    while heap:
        d, x = heapq.heappop(heap)
        if x in done:
            continue
        done.add(x)
        for y, idx in g.adj[x]:
            if idx in dead or (allowed is not None and not allowed(idx)):
                continue
            nd = d + g.edges[idx].w
            if nd <= limit and nd < dist.get(y, INF):
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return {v: d for v, d in dist.items() if v in done}


def oracle_distance_bf(g: Graph, F: Iterable[int], s: int, t: int) -> float:
    """Bellman-Ford; quadratic, for cross-checking on small graphs."""
    dead = _dead(F)
    dist = [INF] * (g.n + 1)
    dist[s] = 0
    live = [e for idx, e in enumerate(g.edges) if idx not in dead]
    for _ in range(g.n - 1):
        changed = False
        for e in live:
            if dist[e.u] + e.w < dist[e.v]:
                dist[e.v] = dist[e.u] + e.w
                changed = True
            if dist[e.v] + e.w < dist[e.u]:
                dist[e.u] = dist[e.v] + e.w
                changed = True
        if not changed:
            break
    return dist[t]


def replay_path(g: Graph, tree, F: Iterable[int], segments, s: int, t: int) -> list[int]:
    """Expand alternating tree/edge segments into an s-t walk in G minus F.

    ``segments`` are ``(kind, a, b)`` triples: kind 1 is the path from a to b
    in ``tree``, kind 0 the single graph edge a-b.  Raises ValueError on any
    break in the walk or use of a faulty edge; returns the vertex sequence.
    """
    dead = _dead(F)
    walk = [s]
    for kind, a, b, *_ in segments:
        if a != walk[-1]:
            raise ValueError(f"segment starts at {a}, walk is at {walk[-1]}")
        if kind == 1:
            if a not in tree or b not in tree:
                raise ValueError(f"tree segment {a}..{b} leaves the tree")
            used = tree.path_edges(a, b)
            walk += tree.path(a, b)[1:]
        else:
            if not g.has_edge(a, b):
                raise ValueError(f"{a}-{b} is not an edge")
            used = [g.edge_id(a, b)]
            walk.append(b)
        hit = dead.intersection(used)
        if hit:
            raise ValueError(f"segment {a}..{b} uses faulty edges {sorted(hit)}")
    if walk[-1] != t:
        raise ValueError(f"walk ends at {walk[-1]}, not {t}")
    return walk


# -- fixtures ------------------------------------------------------------------

KINDS = ("erdos_renyi", "grid", "path_bundle", "tree_plus_chords")


@dataclass(frozen=True)
class FixtureSpec:
    kind: str
    n: int = 0
    p: float = 0.0
    f: int = 0
    L: int = 0
    seed: int = 0
    rows: int = 0
    cols: int = 0
    chords: int = 0
    max_weight: int = 1

    @classmethod
    def from_dict(cls, d: dict) -> "FixtureSpec":
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise BadSpec(f"unknown fixture fields {sorted(extra)}")
        return cls(**d)


@dataclass
class Fixture:
    graph: Graph
    s: int
    t: int
    faults: list[int] | None = None
    # path_bundle only: survivor index -> fault set (the other paths' last edges)
    fault_for_survivor: Callable[[int], list[int]] | None = field(default=None, repr=False)
    paths: list[list[int]] | None = None


def _weights(rng: random.Random, count: int, max_weight: int) -> list[int]:
    return [rng.randint(1, max_weight) if max_weight > 1 else 1 for _ in range(count)]


def make_fixture(spec: FixtureSpec) -> Fixture:
    if spec.kind not in KINDS:
        raise BadSpec(f"unknown fixture kind {spec.kind!r}")
    if spec.max_weight < 1:
        raise BadSpec("max_weight must be >= 1")
    rng = random.Random(spec.seed)
    if spec.kind == "erdos_renyi":
        return _erdos_renyi(spec, rng)
    if spec.kind == "grid":
        return _grid(spec, rng)
    if spec.kind == "path_bundle":
        return _path_bundle(spec)
    return _tree_plus_chords(spec, rng)


def _erdos_renyi(spec: FixtureSpec, rng: random.Random) -> Fixture:
    n, p = spec.n, spec.p
    if n < 2 or not 0 < p <= 1:
        raise BadSpec("erdos_renyi needs n >= 2 and 0 < p <= 1")
    pairs = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    for _ in range(10_000):
        chosen = [uv for uv in pairs if rng.random() < p]
        ws = _weights(rng, len(chosen), spec.max_weight)
        g = build_graph([(u, v, w) for (u, v), w in zip(chosen, ws)], n=n)
        if len(set(component_ids(g, ())[1:])) == 1:
            return Fixture(g, 1, n)
    raise BadSpec(f"p={p} too small to draw a connected graph on {n} vertices")


def _grid(spec: FixtureSpec, rng: random.Random) -> Fixture:
    r, c = spec.rows, spec.cols
    if r < 1 or c < 1 or r * c < 2:
        raise BadSpec("grid needs rows*cols >= 2")
    vid = lambda i, j: i * c + j + 1  # noqa: E731
    pairs = []
    for i in range(r):
        for j in range(c):
            if j + 1 < c:
                pairs.append((vid(i, j), vid(i, j + 1)))
            if i + 1 < r:
                pairs.append((vid(i, j), vid(i + 1, j)))
    ws = _weights(rng, len(pairs), spec.max_weight)
    g = build_graph([(u, v, w) for (u, v), w in zip(pairs, ws)], n=r * c)
    return Fixture(g, 1, r * c)


def _path_bundle(spec: FixtureSpec) -> Fixture:
    f, L = spec.f, spec.L
    if f < 0 or L < 1:
        raise BadSpec("path_bundle needs f >= 0 and L >= 1")
    if L == 1 and f > 0:
        raise BadSpec("L = 1 would put parallel s-t edges in the bundle")
    s, t = 1, 2
    nxt = 3
    edges = []
    paths = []
    for _ in range(f + 1):
        verts = [s] + list(range(nxt, nxt + L - 1)) + [t]
        nxt += L - 1
        first = len(edges)
        edges += [(a, b_, 1) for a, b_ in zip(verts, verts[1:])]
        paths.append(list(range(first, len(edges))))
    g = build_graph(edges, n=nxt - 1)

    def fault_for_survivor(k: int) -> list[int]:
        if not 0 <= k <= f:
            raise BadSpec(f"survivor {k} outside 0..{f}")
        return [p[-1] for q, p in enumerate(paths) if q != k]

    return Fixture(g, s, t, None, fault_for_survivor, paths)


def _tree_plus_chords(spec: FixtureSpec, rng: random.Random) -> Fixture:
    n = spec.n
    if n < 2:
        raise BadSpec("tree_plus_chords needs n >= 2")
    edges = {}
    for v in range(2, n + 1):
        u = rng.randint(1, v - 1)
        edges[(u, v)] = True
    max_chords = n * (n - 1) // 2 - (n - 1)
    if spec.chords > max_chords:
        raise BadSpec(f"at most {max_chords} chords fit on {n} vertices")
    while len(edges) < n - 1 + spec.chords:
        u, v = sorted(rng.sample(range(1, n + 1), 2))
        edges.setdefault((u, v), True)
    pairs = list(edges)
    ws = _weights(rng, len(pairs), spec.max_weight)
    g = build_graph([(u, v, w) for (u, v), w in zip(pairs, ws)], n=n)
    return Fixture(g, 1, n)


def batch_reachability(base_adj, fu, fv):
    """Reachability masks in many small graphs at once.

    ``base_adj`` is an ``(N, nv)`` uint64 array of neighbour bitmasks (vertex
    positions ``0..nv-1``), one graph per row; ``fu``/``fv`` are ``(N, k)``
    endpoint positions of the edges to delete from that row.  Returns the
    ``(N, nv)`` array whose entry ``[r, v]`` has bit ``u`` set iff ``u`` is
    reachable from ``v``.  Computed by repeated squaring of the reachability
    relation, independently of any graph search code.
    """
    import numpy as np

    nv = np.shape(base_adj)[1]
    dt = next(t for t in (np.uint8, np.uint16, np.uint32, np.uint64) if np.iinfo(t).bits >= nv)
    adj = np.array(base_adj, dtype=dt, copy=True)
    rows = adj.shape[0]
    r = np.arange(rows)
    one = dt(1)
    for j in range(fu.shape[1]):
        u = fu[:, j].astype(dt)
        v = fv[:, j].astype(dt)
        adj[r, fu[:, j]] &= ~(one << v)
        adj[r, fv[:, j]] &= ~(one << u)
    reach = adj | (one << np.arange(nv, dtype=dt))
    while True:
        grown = reach.copy()
        for u in range(nv):
            has_u = (reach >> dt(u)) & one
            grown |= reach[:, u : u + 1] * has_u
        if np.array_equal(grown, reach):
            return reach
        reach = grown
