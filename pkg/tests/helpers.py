"""Graph generators and loaders shared by the test modules."""

from __future__ import annotations

import random
from functools import lru_cache
from pathlib import Path

from hypothesis import strategies as st

from ftlabels.graph import Graph, build_graph

DATA = Path(__file__).parent / "data"


@lru_cache(maxsize=None)
def small_graphs(max_n: int = 8) -> tuple[Graph, ...]:
    """Every connected graph on 2..max_n vertices up to isomorphism."""
    import networkx as nx

    out = []
    for line in (DATA / "connected_graphs.g6").read_text().split():
        h = nx.from_graph6_bytes(line.encode())
        n = h.number_of_nodes()
        if n <= max_n:
            out.append(build_graph([(u + 1, v + 1) for u, v in h.edges()], n=n))
    return tuple(out)


def random_connected(rng: random.Random, n: int, extra: int, max_weight: int = 1) -> Graph:
    """Random spanning tree plus ``extra`` random chords, shuffled edge order."""
    pairs = set()
    verts = list(range(1, n + 1))
    rng.shuffle(verts)
    for i in range(1, n):
        u, v = verts[i], verts[rng.randrange(i)]
        pairs.add((min(u, v), max(u, v)))
    cap = n * (n - 1) // 2
    while len(pairs) < min(cap, n - 1 + extra):
        u, v = sorted(rng.sample(range(1, n + 1), 2))
        pairs.add((u, v))
    edges = [(u, v, rng.randint(1, max_weight)) for u, v in sorted(pairs)]
    rng.shuffle(edges)
    return build_graph(edges, n=n)


def random_tree(rng: random.Random, n: int) -> Graph:
    return random_connected(rng, n, 0)


@st.composite
def connected_graphs(draw, min_n: int = 2, max_n: int = 12, max_extra: int = 12, max_weight: int = 1):
    n = draw(st.integers(min_n, max_n))
    extra = draw(st.integers(0, max_extra))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_connected(random.Random(seed), n, extra, max_weight)


def fault_sets(g: Graph, rng: random.Random, f: int) -> list[int]:
    return rng.sample(range(g.m), min(g.m, rng.randint(0, f)))
