import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ftlabels.errors import BadSpec
from ftlabels.graph import build_graph, spanning_tree
from ftlabels.oracle import (
    FixtureSpec,
    batch_reachability,
    make_fixture,
    oracle_connected,
    oracle_connected_uf,
    oracle_distance,
    oracle_distance_bf,
    replay_path,
)
from helpers import connected_graphs, random_connected


def test_empty_fault_set_connected():
    g = random_connected(random.Random(1), 20, 10)
    assert all(oracle_connected(g, [], 1, v) for v in g.vertices)


def test_isolating_a_vertex():
    g = random_connected(random.Random(2), 20, 30)
    F = [idx for _, idx in g.adj[5]]
    assert not oracle_connected(g, F, 5, 6 if 5 != 6 else 7)


def test_bfs_and_union_find_agree():
    rng = random.Random(3)
    for _ in range(1000):
        g = random_connected(rng, rng.randint(2, 25), rng.randint(0, 20))
        F = rng.sample(range(g.m), rng.randint(0, min(g.m, 6)))
        s, t = rng.randint(1, g.n), rng.randint(1, g.n)
        assert oracle_connected(g, F, s, t) == oracle_connected_uf(g, F, s, t)


def test_distance_examples():
    assert oracle_distance(build_graph([(1, 2, 7)]), [], 1, 2) == 7
    g = build_graph([(1, 2, 1), (3, 4, 1)], n=4)
    assert oracle_distance(g, [], 1, 4) == math.inf


@settings(max_examples=60, deadline=None)
@given(connected_graphs(max_n=15, max_extra=20, max_weight=20), st.integers(0, 2**32 - 1))
def test_dijkstra_matches_bellman_ford(g, seed):
    rng = random.Random(seed)
    F = rng.sample(range(g.m), rng.randint(0, min(g.m, 4)))
    for t in g.vertices:
        assert oracle_distance(g, F, 1, t) == oracle_distance_bf(g, F, 1, t)


def test_batch_reachability_matches_bfs():
    rng = random.Random(4)
    graphs = [random_connected(rng, 7, rng.randint(0, 10)) for _ in range(50)]
    adj = np.zeros((50, 7), dtype=np.uint64)
    for r, g in enumerate(graphs):
        for e in g.edges:
            adj[r, e.u - 1] |= np.uint64(1 << (e.v - 1))
            adj[r, e.v - 1] |= np.uint64(1 << (e.u - 1))
    F = [rng.sample(range(g.m), 3) for g in graphs]
    fu = np.array([[graphs[r].edges[i].u - 1 for i in F[r]] for r in range(50)])
    fv = np.array([[graphs[r].edges[i].v - 1 for i in F[r]] for r in range(50)])
    reach = batch_reachability(adj, fu, fv)
    for r, g in enumerate(graphs):
        for s in g.vertices:
            for t in g.vertices:
                assert bool(int(reach[r, s - 1]) >> (t - 1) & 1) == oracle_connected(g, F[r], s, t)


def test_path_bundle_small():
    fx = make_fixture(FixtureSpec("path_bundle", f=1, L=3))
    g = fx.graph
    assert g.m == 6 and len(fx.paths) == 2
    inner = set(range(1, g.n + 1)) - {fx.s, fx.t}
    assert len(inner) == 4


def test_path_bundle_distance_is_L_for_every_survivor():
    fx = make_fixture(FixtureSpec("path_bundle", f=4, L=10))
    for k in range(5):
        F = fx.fault_for_survivor(k)
        assert len(F) == 4
        assert oracle_distance(fx.graph, F, fx.s, fx.t) == 10
    with pytest.raises(BadSpec):
        fx.fault_for_survivor(5)


def test_complete_graph():
    g = make_fixture(FixtureSpec("erdos_renyi", n=10, p=1.0)).graph
    assert g.m == 45


def test_other_fixtures_and_bad_specs():
    g = make_fixture(FixtureSpec("grid", rows=3, cols=4)).graph
    assert (g.n, g.m) == (12, 17)
    tc = make_fixture(FixtureSpec("tree_plus_chords", n=30, chords=5, seed=1, max_weight=9)).graph
    assert tc.m == 34 and tc.max_weight <= 9
    for bad in ({"kind": "moebius"}, {"kind": "grid", "bogus": 1}):
        with pytest.raises((BadSpec, TypeError)):
            make_fixture(FixtureSpec.from_dict(bad))
    with pytest.raises(BadSpec):
        make_fixture(FixtureSpec("path_bundle", f=2, L=1))


def test_fixtures_are_deterministic():
    spec = FixtureSpec("erdos_renyi", n=40, p=0.1, seed=9, max_weight=5)
    assert make_fixture(spec).graph.edges == make_fixture(spec).graph.edges


def test_replay_path_rejects_bad_walks():
    g = build_graph([(1, 2), (2, 3), (3, 4), (1, 4)])
    t = spanning_tree(g, 1)
    assert replay_path(g, t, [], [(1, 1, 4)], 1, 4)[-1] == 4
    with pytest.raises(ValueError):
        replay_path(g, t, [g.edge_id(3, 4)], [(1, 1, 4)], 1, 4)
    with pytest.raises(ValueError):
        replay_path(g, t, [], [(0, 1, 3)], 1, 3)
    with pytest.raises(ValueError):
        replay_path(g, t, [], [(1, 1, 2), (0, 3, 4)], 1, 4)
