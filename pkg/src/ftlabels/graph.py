"""Weighted undirected graphs, rooted spanning trees and DFS ancestry labels."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import BadVertexId, BadWeight, Disconnected, DuplicateEdge, SelfLoop

DEFAULT_MAX_WEIGHT = 2**20


class Edge(NamedTuple):
    u: int
    v: int
    w: int
    port_u: int
    port_v: int

    @property
    def key(self) -> tuple[int, int]:
        return (self.u, self.v) if self.u < self.v else (self.v, self.u)

    def other(self, x: int) -> int:
        return self.v if x == self.u else self.u

    def port_at(self, x: int) -> int:
        return self.port_u if x == self.u else self.port_v


class AncestryLabel(NamedTuple):
    dfs_in: int
    dfs_out: int


def is_ancestor(a: AncestryLabel, b: AncestryLabel) -> bool:
    """True iff the vertex labelled ``a`` is an ancestor of (or equal to) ``b``."""
    return a.dfs_in <= b.dfs_in and b.dfs_out <= a.dfs_out


class Graph:
    """Immutable undirected graph on vertices ``1..n``.

    Ports are assigned per vertex in the order edges appear in the input list,
    so ``adj[v][p]`` is the neighbour reached through port ``p`` of ``v``.
    """

    def __init__(self, n: int, edges: Sequence[Edge]):
        self.n = n
        self.edges: tuple[Edge, ...] = tuple(edges)
        self.adj: list[list[tuple[int, int]]] = [[] for _ in range(n + 1)]
        self._index: dict[tuple[int, int], int] = {}
        for idx, e in enumerate(self.edges):
            self._index[e.key] = idx
        # adjacency is rebuilt in port order, which may differ from edge order
        slots: list[dict[int, tuple[int, int]]] = [{} for _ in range(n + 1)]
        for idx, e in enumerate(self.edges):
            slots[e.u][e.port_u] = (e.v, idx)
            slots[e.v][e.port_v] = (e.u, idx)
        for v in range(1, n + 1):
            self.adj[v] = [slots[v][p] for p in range(len(slots[v]))]

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def edge_id(self, u: int, v: int) -> int:
        return self._index[(u, v) if u < v else (v, u)]

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self._index

    def edge(self, u: int, v: int) -> Edge:
        return self.edges[self.edge_id(u, v)]

    def neighbor(self, v: int, port: int) -> tuple[int, int]:
        """(neighbour, edge index) behind ``port`` of ``v``."""
        return self.adj[v][port]

    def port(self, u: int, v: int) -> int:
        return self.edge(u, v).port_at(u)

    @property
    def max_weight(self) -> int:
        return max((e.w for e in self.edges), default=1)

    def edge_list(self) -> list[tuple[int, int, int]]:
        return [(e.u, e.v, e.w) for e in self.edges]

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def build_graph(
    edge_list: Iterable[Sequence[int]],
    n: int | None = None,
    max_weight: int = DEFAULT_MAX_WEIGHT,
) -> Graph:
    """Build a graph from ``(u, v)`` or ``(u, v, w)`` tuples with canonical ports.

    ``n`` defaults to the largest endpoint.
    """
    raw = []
    for item in edge_list:
        if len(item) == 2:
            u, v = item
            w = 1
        else:
            u, v, w = item
        raw.append((int(u), int(v), int(w)))
    if n is None:
        n = max((max(u, v) for u, v, _ in raw), default=0)
    seen: set[tuple[int, int]] = set()
    deg = [0] * (n + 1)
    edges = []
    for u, v, w in raw:
        if not (1 <= u <= n and 1 <= v <= n):
            raise BadVertexId(f"edge ({u},{v}) outside 1..{n}")
        if u == v:
            raise SelfLoop(f"self-loop at {u}")
        if not 1 <= w <= max_weight:
            raise BadWeight(f"weight {w} of ({u},{v}) outside [1,{max_weight}]")
        key = (u, v) if u < v else (v, u)
        if key in seen:
            raise DuplicateEdge(f"duplicate edge {key}")
        seen.add(key)
        edges.append(Edge(u, v, w, deg[u], deg[v]))
        deg[u] += 1
        deg[v] += 1
    return Graph(n, edges)


def components(g: Graph, removed: Iterable[int] = ()) -> list[list[int]]:
    """Connected components of ``g`` minus the edges with the given indices."""
    dead = set(removed)
    seen = [False] * (g.n + 1)
    out = []
    for r in g.vertices:
        if seen[r]:
            continue
        seen[r] = True
        comp = [r]
        stack = [r]
        while stack:
            x = stack.pop()
            for y, idx in g.adj[x]:
                if not seen[y] and idx not in dead:
                    seen[y] = True
                    comp.append(y)
                    stack.append(y)
        out.append(comp)
    return out


@dataclass(frozen=True)
class SpanningTree:
    """Rooted tree over a vertex subset of a graph.

    ``parent[v]`` is ``(parent vertex, edge index)``; the root maps to ``None``.
    DFS timestamps come from a single scan visiting children in ascending id,
    and use the values ``1..2|V(T)|``.
    """

    root: int
    parent: dict[int, tuple[int, int] | None]
    children: dict[int, tuple[int, ...]]
    dfs_in: dict[int, int]
    dfs_out: dict[int, int]
    depth: dict[int, int]
    tree_edges: frozenset[int] = field(repr=False)

    @classmethod
    def from_parents(cls, root: int, parent: dict[int, tuple[int, int] | None]) -> "SpanningTree":
        kids: dict[int, list[int]] = {v: [] for v in parent}
        for v, pe in parent.items():
            if pe is not None:
                kids[pe[0]].append(v)
        children = {v: tuple(sorted(c)) for v, c in kids.items()}
        dfs_in: dict[int, int] = {}
        dfs_out: dict[int, int] = {}
        depth = {root: 0}
        clock = 0
        stack: list[tuple[int, int]] = [(root, 0)]
        while stack:
            v, i = stack.pop()
            if i == 0:
                clock += 1
                dfs_in[v] = clock
            ch = children[v]
            if i < len(ch):
                stack.append((v, i + 1))
                c = ch[i]
                depth[c] = depth[v] + 1
                stack.append((c, 0))
            else:
                clock += 1
                dfs_out[v] = clock
        if len(dfs_in) != len(parent):
            raise ValueError("parent map is not a tree rooted at %r" % root)
        tree_edges = frozenset(pe[1] for pe in parent.values() if pe is not None)
        return cls(root, dict(parent), children, dfs_in, dfs_out, depth, tree_edges)

    @property
    def vertices(self):
        return self.parent.keys()

    @property
    def size(self) -> int:
        return len(self.parent)

    def __contains__(self, v: int) -> bool:
        return v in self.parent

    def anc(self, v: int) -> AncestryLabel:
        return AncestryLabel(self.dfs_in[v], self.dfs_out[v])

    def parent_of(self, v: int) -> int | None:
        pe = self.parent[v]
        return None if pe is None else pe[0]

    def is_tree_edge(self, idx: int) -> bool:
        return idx in self.tree_edges

    def lower_endpoint(self, e: Edge) -> int:
        """The child endpoint of a tree edge."""
        pe = self.parent.get(e.u)
        if pe is not None and pe[0] == e.v:
            return e.u
        return e.v

    def degree(self, v: int) -> int:
        return len(self.children[v]) + (0 if self.parent[v] is None else 1)

    def subtree(self, v: int) -> Iterator[int]:
        stack = [v]
        while stack:
            x = stack.pop()
            yield x
            stack.extend(self.children[x])

    def path(self, u: int, v: int) -> list[int]:
        """Vertices of the tree path from ``u`` to ``v``."""
        left, right = [u], [v]
        a, b = u, v
        while self.depth[a] > self.depth[b]:
            a = self.parent[a][0]
            left.append(a)
        while self.depth[b] > self.depth[a]:
            b = self.parent[b][0]
            right.append(b)
        while a != b:
            a = self.parent[a][0]
            b = self.parent[b][0]
            left.append(a)
            right.append(b)
        right.pop()
        return left + right[::-1]

    def path_edges(self, u: int, v: int) -> list[int]:
        verts = self.path(u, v)
        out = []
        for x, y in zip(verts, verts[1:]):
            pe = self.parent[x]
            out.append(pe[1] if pe is not None and pe[0] == y else self.parent[y][1])
        return out


def spanning_tree(g: Graph, root: int = 1) -> SpanningTree:
    """DFS spanning tree of a connected graph rooted at ``root``."""
    if not 1 <= root <= g.n:
        raise BadVertexId(root)
    parent: dict[int, tuple[int, int] | None] = {root: None}
    stack = [(root, 0)]
    while stack:
        v, i = stack.pop()
        if i < len(g.adj[v]):
            stack.append((v, i + 1))
            y, idx = g.adj[v][i]
            if y not in parent:
                parent[y] = (v, idx)
                stack.append((y, 0))
    if len(parent) != g.n:
        raise Disconnected(components(g))
    return SpanningTree.from_parents(root, parent)


# -- text / JSON formats -----------------------------------------------------


def parse_graph_text(text: str, max_weight: int = DEFAULT_MAX_WEIGHT) -> Graph:
    """Parse ``n m`` followed by ``m`` lines ``u v [w]``; ``#`` starts a comment."""
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append([int(tok) for tok in line.split()])
    if not rows:
        raise ValueError("empty graph file")
    header = rows[0]
    if len(header) != 2:
        raise ValueError("first line must be 'n m'")
    n, m = header
    body = rows[1:]
    if len(body) != m:
        raise ValueError(f"header announces {m} edges, found {len(body)}")
    for row in body:
        if len(row) not in (2, 3):
            raise ValueError(f"bad edge line {row}")
    return build_graph(body, n=n, max_weight=max_weight)


def format_graph_text(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines += [f"{e.u} {e.v} {e.w}" for e in g.edges]
    return "\n".join(lines) + "\n"


def graph_to_json(g: Graph) -> str:
    return json.dumps(
        {
            "n": g.n,
            "edges": [
                {"u": e.u, "v": e.v, "w": e.w, "port_u": e.port_u, "port_v": e.port_v}
                for e in g.edges
            ],
        }
    )


def graph_from_json(text: str) -> Graph:
    data = json.loads(text)
    n = data["n"]
    edges = []
    seen = set()
    for rec in data["edges"]:
        e = Edge(rec["u"], rec["v"], rec.get("w", 1), rec["port_u"], rec["port_v"])
        if not (1 <= e.u <= n and 1 <= e.v <= n):
            raise BadVertexId(e)
        if e.u == e.v:
            raise SelfLoop(e)
        if e.key in seen:
            raise DuplicateEdge(e.key)
        seen.add(e.key)
        edges.append(e)
    g = Graph(n, edges)
    for v in g.vertices:
        ports = sorted(e.port_at(v) for e in edges if v in (e.u, e.v))
        if ports != list(range(len(ports))):
            raise ValueError(f"ports at vertex {v} are not 0..deg-1")
    return g


def load_graph(path: str) -> Graph:
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return graph_from_json(text)
    return parse_graph_text(text)
