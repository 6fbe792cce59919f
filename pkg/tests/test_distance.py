import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ftlabels.distance import assign_dist_labels, dist_decode
from ftlabels.errors import MixedInstance, TooManyFaults
from ftlabels.graph import build_graph
from ftlabels.oracle import oracle_distance, replay_path
from helpers import connected_graphs, random_connected


def test_scale_count_for_unweighted_graphs():
    g = random_connected(random.Random(1), 50, 30)
    lab = assign_dist_labels(g, 2, 2)
    assert lab.scales == math.ceil(math.log2(50)) + 1


def test_single_edge():
    g = build_graph([(1, 2, 1)])
    lab = assign_dist_labels(g, 1, 2)
    est = dist_decode(lab.vertex[1], lab.vertex[2], [])
    assert est.scale == 1 and est.value == (4 * 2 - 1) * 1 * 2
    # one tree per scale, so one instance per scale
    assert len(lab.vertex[1].entries) == lab.scales


def test_same_vertex_is_zero():
    g = random_connected(random.Random(2), 20, 10)
    lab = assign_dist_labels(g, 2, 2)
    assert dist_decode(lab.vertex[3], lab.vertex[3], [lab.edge[0]]).value == 0


def test_disconnected_is_infinite():
    g = build_graph([(1, 2, 3), (2, 3, 1), (3, 4, 5)])
    lab = assign_dist_labels(g, 2, 2)
    est = dist_decode(lab.vertex[1], lab.vertex[4], [lab.edge[1]])
    assert not est.finite and oracle_distance(g, [1], 1, 4) == math.inf


def test_errors():
    g = random_connected(random.Random(3), 20, 10)
    a = assign_dist_labels(g, 1, 2, seed=1)
    b = assign_dist_labels(g, 1, 2, seed=2)
    with pytest.raises(TooManyFaults):
        dist_decode(a.vertex[1], a.vertex[2], [a.edge[0], a.edge[1]], f=1)
    with pytest.raises(MixedInstance):
        dist_decode(a.vertex[1], b.vertex[2], [])


def test_duplicate_faults_count_once():
    g = random_connected(random.Random(4), 30, 20)
    lab = assign_dist_labels(g, 2, 2)
    one = dist_decode(lab.vertex[1], lab.vertex[9], [lab.edge[3]])
    two = dist_decode(lab.vertex[1], lab.vertex[9], [lab.edge[3], lab.edge[3]])
    assert one.value == two.value


def _sandwich(g, lab, k, s, t, F):
    est = dist_decode(lab.vertex[s], lab.vertex[t], [lab.edge[i] for i in F], want_path=True)
    d = oracle_distance(g, F, s, t)
    if d == math.inf:
        assert not est.finite
        return est
    assert est.finite
    assert d <= est.value <= (8 * k - 2) * (len(set(F)) + 1) * d
    # a realising walk: at most |F|+1 tree segments and |F| light edges
    tree = lab.covers[est.scale - 1].trees[est.tree]
    segs = [(x.kind, x.a, x.b) for x in est.path.segments]
    walk = replay_path(g, tree, F, segs, s, t)
    weight = sum(g.edge(a, b).w for a, b in zip(walk, walk[1:]))
    assert d <= weight <= est.value
    assert all(g.edge(x.a, x.b).w < 1 << est.scale for x in est.path.segments if x.kind == 0)
    assert sum(x.kind == 1 for x in est.path.segments) <= len(set(F)) + 1
    return est


@pytest.mark.parametrize("k", [2, 3])
def test_sandwich_on_random_queries(k):
    rng = random.Random(k)
    for _ in range(4):
        g = random_connected(rng, rng.randint(20, 80), rng.randint(10, 80), max_weight=12)
        lab = assign_dist_labels(g, 4, k, seed=rng.getrandbits(32))
        for _ in range(25):
            s, t = rng.sample(range(1, g.n + 1), 2)
            F = rng.sample(range(g.m), rng.randint(0, 4))
            _sandwich(g, lab, k, s, t, F)


@settings(max_examples=15, deadline=None)
@given(connected_graphs(max_n=25, max_extra=20, max_weight=10), st.integers(0, 2**32 - 1))
def test_removing_a_fault_never_raises_the_witness_scale(g, seed):
    rng = random.Random(seed)
    lab = assign_dist_labels(g, 4, 2, seed=seed)
    for _ in range(5):
        s, t = rng.sample(range(1, g.n + 1), 2)
        F = rng.sample(range(g.m), min(g.m, rng.randint(1, 4)))
        big = dist_decode(lab.vertex[s], lab.vertex[t], [lab.edge[i] for i in F])
        small = dist_decode(lab.vertex[s], lab.vertex[t], [lab.edge[i] for i in F[1:]])
        if big.finite:
            assert small.finite and small.scale <= big.scale


def test_label_size_growth():
    ratios_v, ratios_e = [], []
    for n in (64, 128, 256):
        g = random_connected(random.Random(n), n, n)
        lab = assign_dist_labels(g, 2, 2)
        shape = 2 * n**0.5 * lab.scales
        ratios_v.append(max(lab.vertex_bits(v) for v in g.vertices) / (shape * math.log2(n)))
        ratios_e.append(max(lab.edge_bits(i) for i in range(g.m)) / (shape * math.log2(n) ** 3))
    for r in (ratios_v, ratios_e):
        assert max(r) / min(r) <= 4


def test_labels_sorted_for_lookup():
    g = random_connected(random.Random(8), 60, 60, max_weight=5)
    lab = assign_dist_labels(g, 2, 2)
    for v in g.vertices:
        keys = [(i, j) for i, j, _ in lab.vertex[v].entries]
        assert keys == sorted(keys)
        for i, j in keys:
            assert lab.vertex[v].at(i, j) is not None
        assert lab.vertex[v].at(99, 0) is None
