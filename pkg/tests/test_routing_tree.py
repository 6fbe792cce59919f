import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ftlabels.graph import build_graph, spanning_tree
from ftlabels.routing.tree import (
    TreeLabelCodec,
    gamma_set,
    heavy_children,
    next_hop,
    tree_routing_scheme,
)
from helpers import random_tree


def star(children):
    return build_graph([(1, c) for c in range(2, children + 2)])


def replay(g, tables, labels, s, t):
    walk = [s]
    for _ in range(2 * g.n):
        hop = next_hop(tables[walk[-1]], labels[t])
        if hop is None:
            return walk
        v, _ = g.neighbor(walk[-1], hop.port)
        walk.append(v)
    raise AssertionError("tree routing did not terminate")


def test_gamma_small_degree_is_the_edge():
    g = build_graph([(v // 2, v) for v in range(2, 16)])
    t = spanning_tree(g, 1)
    for v in range(2, 16):
        assert set(gamma_set(t, v, 3)) == {v // 2, v}


def test_gamma_blocks_of_a_star():
    t = spanning_tree(star(10), 1)
    blocks = {gamma_set(t, v, 1) for v in range(2, 12)}
    assert sorted(blocks) == [(2, 3), (4, 5), (6, 7), (8, 9), (10, 11)]
    t = spanning_tree(star(11), 1)
    assert gamma_set(t, 12, 1) == (10, 11, 12)
    assert {len(gamma_set(t, v, 1)) for v in range(2, 13)} == {2, 3}


def test_gamma_of_root_is_an_error():
    t = spanning_tree(star(3), 1)
    with pytest.raises(ValueError):
        gamma_set(t, 1, 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 80), st.integers(0, 5), st.integers(0, 2**32 - 1))
def test_gamma_contains_the_child_and_is_bounded(n, f, seed):
    g = random_tree(random.Random(seed), n)
    t = spanning_tree(g, 1)
    for v in t.vertices:
        if t.parent_of(v) is None:
            continue
        gam = gamma_set(t, v, f)
        assert v in gam
        assert len(gam) <= max(2, 2 * f + 1)


def test_path_routing():
    g = build_graph([(v, v + 1) for v in range(1, 10)])
    t = spanning_tree(g, 1)
    labels, tables = tree_routing_scheme(g, t, 1)
    assert replay(g, tables, labels, 10, 1) == list(range(10, 0, -1))
    assert replay(g, tables, labels, 3, 7) == [3, 4, 5, 6, 7]
    assert all(not l.light for l in labels.values())


def test_star_routing_uses_light_ports():
    g = star(6)
    t = spanning_tree(g, 1)
    labels, tables = tree_routing_scheme(g, t, 1)
    assert replay(g, tables, labels, 3, 6) == [3, 1, 6]
    heavy = heavy_children(t)[1]
    assert sum(1 for v in range(2, 8) if labels[v].light) == 5
    assert not labels[heavy].light


@pytest.mark.parametrize("seed", range(3))
def test_random_tree_routing_matches_tree_paths(seed):
    rng = random.Random(seed)
    g = random_tree(rng, 500)
    t = spanning_tree(g, rng.randint(1, 500))
    labels, tables = tree_routing_scheme(g, t, 2)
    assert max(len(l.light) for l in labels.values()) <= 500 .bit_length()
    for _ in range(200):
        s, d = rng.sample(range(1, 501), 2)
        walk = replay(g, tables, labels, s, d)
        assert walk == t.path(s, d)
        assert len(walk) - 1 <= t.depth[s] + t.depth[d]


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 60), st.integers(0, 4), st.integers(0, 2**32 - 1))
def test_codec_round_trip(n, f, seed):
    g = random_tree(random.Random(seed), n)
    t = spanning_tree(g, 1)
    labels, _ = tree_routing_scheme(g, t, f)
    codec = TreeLabelCodec.for_tree(g, labels, max(1, (2 * n).bit_length()), f)
    for lab in labels.values():
        x = codec.pack(lab)
        assert x.bit_length() <= codec.width
        assert codec.unpack(x) == lab


def test_codec_rejects_overflow():
    g = star(4)
    labels, _ = tree_routing_scheme(g, spanning_tree(g, 1), 1)
    codec = TreeLabelCodec.for_tree(g, labels, 2, 1)
    with pytest.raises(ValueError):
        codec.pack(labels[5])
