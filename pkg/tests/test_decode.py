import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import ftlabels.decode as decode_mod
from ftlabels.decode import (
    FaultSetSketchDecoder,
    build_component_tree,
    cancel_faulty_edges,
    component_sketches,
    naive_component_tree,
    naive_locate,
    sketch_decode,
)
from ftlabels.errors import EmptyTreeFaults, MixedInstance, TooManyFaults
from ftlabels.graph import build_graph, spanning_tree
from ftlabels.oracle import component_ids, oracle_connected, replay_path
from ftlabels.sampling import SeedPair
from ftlabels.sketch import assign_sketch_labels, edge_sketch, make_eid, vertex_sketches
from helpers import connected_graphs, random_connected, random_tree, small_graphs

SEEDS = SeedPair(31, 41)


def lower_of(t, idx, g):
    low = t.lower_endpoint(g.edges[idx])
    return low, t.anc(low)


def walk_up_component(t, F_T, v, lows):
    """Component of v: climb parents until crossing a faulty edge."""
    x = v
    while True:
        pe = t.parent[x]
        if pe is None:
            return 0
        if pe[1] in F_T:
            return lows.index(x) + 1
        x = pe[0]


def test_empty_tree_faults():
    with pytest.raises(EmptyTreeFaults):
        build_component_tree([])


def test_one_fault_two_components():
    g = build_graph([(1, 2), (2, 3), (3, 4)])
    t = spanning_tree(g, 1)
    ct = build_component_tree([lower_of(t, g.edge_id(2, 3), g)])
    assert len(ct) == 2 and ct.reps[1] == 3 and ct.parent == [-1, 0]
    assert ct.locate(t.anc(1)) == 0 and ct.locate(t.anc(3)) == 1 and ct.locate(t.anc(4)) == 1


def test_faults_on_a_root_path_make_a_path_of_components():
    g = build_graph([(i, i + 1) for i in range(1, 7)])
    t = spanning_tree(g, 1)
    F = [g.edge_id(i, i + 1) for i in (1, 2, 4, 5)]
    ct = build_component_tree([lower_of(t, i, g) for i in F])
    assert len(ct) == 5
    assert ct.parent == [-1, 0, 1, 2, 3]


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 30), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_component_tree_matches_naive(n, f, seed):
    rng = random.Random(seed)
    g = random_tree(rng, n)
    t = spanning_tree(g, rng.randint(1, n))
    F = rng.sample(sorted(t.tree_edges), min(f, n - 1))
    lower = [lower_of(t, i, g) for i in F]
    ct = build_component_tree(lower)
    assert ct.parent == naive_component_tree(lower)
    lows = [x for x, _ in lower]
    for v in g.vertices:
        assert ct.locate(t.anc(v)) == naive_locate(lower, t.anc(v)) == walk_up_component(t, set(F), v, lows)


def test_component_tree_random_large():
    rng = random.Random(12)
    for _ in range(200):
        g = random_tree(rng, 200)
        t = spanning_tree(g, 1)
        F = rng.sample(sorted(t.tree_edges), rng.randint(1, 12))
        lower = [lower_of(t, i, g) for i in F]
        assert build_component_tree(lower).parent == naive_component_tree(lower)


def _instance(rng, n, extra, f):
    g = random_connected(rng, n, extra)
    t = spanning_tree(g, 1)
    vl, el = assign_sketch_labels(g, t, SEEDS)
    p = el[0].params
    vs = vertex_sketches(g, t, SEEDS, p)
    tree_f = rng.sample(sorted(t.tree_edges), rng.randint(1, f))
    other = rng.sample(range(g.m), rng.randint(0, f))
    F = sorted(set(tree_f) | set(other))[: f + 2]
    F_T = [i for i in F if t.is_tree_edge(i)]
    return g, t, vl, el, p, vs, F, F_T


def test_component_sketches_and_cancellation_against_rebuild():
    rng = random.Random(3)
    for _ in range(40):
        g, t, vl, el, p, vs, F, F_T = _instance(rng, 40, 40, 5)
        lower = [lower_of(t, i, g) for i in F_T]
        ct = build_component_tree(lower)
        temp = [el[F_T[0]].sketch_all] + [el[i].lower()[1] for i in F_T]
        comps = component_sketches(ct, temp)
        members = {c: [] for c in range(len(ct))}
        for v in g.vertices:
            members[ct.locate(t.anc(v))].append(v)
        for c, vs_c in members.items():
            acc = 0
            for v in vs_c:
                acc ^= vs[v]
            assert comps[c] == acc
        cleaned = cancel_faulty_edges(ct, comps, [el[i].eid for i in F], p, SEEDS.seed_h)
        fam = p.family(SEEDS.seed_h)
        dead = set(F)
        for c, vs_c in members.items():
            inside = set(vs_c)
            acc = 0
            for idx, e in enumerate(g.edges):
                if idx not in dead and (e.u in inside) != (e.v in inside):
                    acc ^= edge_sketch(p, fam, make_eid(SEEDS.seed_id, p, e.u, e.v, t.anc(e.u), t.anc(e.v)))
            assert cleaned[c] == acc


def test_leaf_component_keeps_its_temporary_sketch():
    g = build_graph([(1, 2), (2, 3), (3, 1), (3, 4), (4, 5)])
    t = spanning_tree(g, 1)
    vl, el = assign_sketch_labels(g, t, SEEDS)
    idx = g.edge_id(4, 5)
    ct = build_component_tree([lower_of(t, idx, g)])
    temp = [el[idx].sketch_all, el[idx].lower()[1]]
    comps = component_sketches(ct, temp)
    assert comps[1] == temp[1]
    assert comps[0] == temp[0] ^ temp[1]


def test_cancellation_without_crossing_edges_and_involution():
    g = build_graph([(1, 2), (2, 3), (3, 1), (3, 4)])
    t = spanning_tree(g, 1)
    vl, el = assign_sketch_labels(g, t, SEEDS)
    bridge = g.edge_id(3, 4)
    ct = build_component_tree([lower_of(t, bridge, g)])
    comps = component_sketches(ct, [el[bridge].sketch_all, el[bridge].lower()[1]])
    inner = [el[g.edge_id(1, 2)].eid]
    p = el[0].params
    assert cancel_faulty_edges(ct, comps, inner, p, SEEDS.seed_h) == comps
    once = cancel_faulty_edges(ct, comps, [el[bridge].eid], p, SEEDS.seed_h)
    assert cancel_faulty_edges(ct, once, [el[bridge].eid], p, SEEDS.seed_h) == comps
    assert once == [0, 0]


def test_same_component_gives_single_tree_segment():
    g = build_graph([(1, 2), (2, 3), (3, 4)])
    t = spanning_tree(g, 1)
    vl, el = assign_sketch_labels(g, t, SEEDS)
    res = sketch_decode(vl[1], vl[2], [el[g.edge_id(3, 4)]])
    assert res.connected
    assert [(s.kind, s.a, s.b) for s in res.path.segments] == [(1, 1, 2)]


def test_one_surviving_edge_gives_three_segments():
    # 1-2-3 and 4-5-6 joined by tree edge 3-4 and the spare edge 2-5
    g = build_graph([(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (2, 5)])
    t = spanning_tree(g, 1)
    assert t.is_tree_edge(g.edge_id(3, 4)) and not t.is_tree_edge(g.edge_id(2, 5))
    vl, el = assign_sketch_labels(g, t, SEEDS)
    res = sketch_decode(vl[1], vl[6], [el[g.edge_id(3, 4)]])
    assert res.connected and res.phases == 1
    assert [(s.kind, s.a, s.b) for s in res.path.segments] == [(1, 1, 2), (0, 2, 5), (1, 5, 6)]


def test_decoder_errors():
    g = random_connected(random.Random(1), 10, 6)
    t = spanning_tree(g, 1)
    vl, el = assign_sketch_labels(g, t, SEEDS)
    with pytest.raises(TooManyFaults):
        sketch_decode(vl[1], vl[2], [el[0], el[1], el[2]], f=2)
    vl2, el2 = assign_sketch_labels(g, t, SeedPair(5, 6))
    with pytest.raises(MixedInstance):
        sketch_decode(vl[1], vl[2], [el[0], el2[1]])
    with pytest.raises(MixedInstance):
        sketch_decode(vl[1], vl2[2], [])


def test_phase_q_reads_only_unit_q(monkeypatch):
    rng = random.Random(6)
    seen = []
    real = decode_mod.unit_cells

    def spy(sk, p, q):
        seen.append(q)
        return real(sk, p, q)

    monkeypatch.setattr(decode_mod, "unit_cells", spy)
    for _ in range(30):
        g, t, vl, el, p, vs, F, F_T = _instance(rng, 30, 20, 6)
        dec = FaultSetSketchDecoder([el[i] for i in F])
        seen.clear()
        run = dec.full_run()
        # units are consumed in order, never revisited
        assert seen == sorted(seen)
        assert not seen or seen[-1] < run.phases


@settings(max_examples=40, deadline=None)
@given(connected_graphs(max_n=12, max_extra=10), st.integers(0, 2**32 - 1))
def test_decoder_is_pure_and_early_exit_agrees(g, seed):
    rng = random.Random(seed)
    t = spanning_tree(g, 1)
    vl, el = assign_sketch_labels(g, t, SeedPair(seed, seed ^ 0xABC))
    F = rng.sample(range(g.m), min(g.m, rng.randint(0, 4)))
    labs = [el[i] for i in F]
    for s, t_ in itertools.combinations(g.vertices, 2):
        a = sketch_decode(vl[s], vl[t_], labs)
        b = sketch_decode(vl[s], vl[t_], labs)
        full = FaultSetSketchDecoder(labs).decode(vl[s], vl[t_], early_exit=False)
        assert a.connected == b.connected == full.connected == oracle_connected(g, F, s, t_)
        assert a.path == b.path
        if a.connected:
            segs = [(x.kind, x.a, x.b) for x in a.path.segments]
            replay_path(g, t, F, segs, s, t_)
            assert len(a.path.recovery_edges) <= len([i for i in F if t.is_tree_edge(i)])


def test_exhaustive_small_graphs_with_path_replay():
    bad = 0
    for g in small_graphs(5):
        t = spanning_tree(g, 1)
        vl, el = assign_sketch_labels(g, t, SEEDS)
        vls = [vl[v] for v in g.vertices]
        for k in range(5):
            for F in itertools.combinations(range(g.m), k):
                dec = FaultSetSketchDecoder([el[i] for i in F])
                comp = component_ids(g, F)
                for s, t_ in itertools.combinations(g.vertices, 2):
                    res = dec.decode(vls[s - 1], vls[t_ - 1])
                    bad += res.connected != (comp[s] == comp[t_])
                    if res.connected:
                        replay_path(g, t, F, res.path.segments, s, t_)
    assert bad == 0
