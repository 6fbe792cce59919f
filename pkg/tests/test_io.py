import random
import struct

import pytest

from ftlabels.cli import RunConfig, answer_query, label_graph
from ftlabels.errors import BadConfig, MissingLabel
from ftlabels.graph import build_graph, format_graph_text, graph_from_json, graph_to_json, parse_graph_text
from ftlabels.io import MAGIC, LabelReader, dump_json, write_label_file
from helpers import random_connected


def cfg(scheme, **kw):
    base = dict(scheme=scheme, f=2, k=2, b=None, L=None, lam=None, seed=3, fmt="json")
    base.update(kw)
    c = RunConfig(**base)
    c.validate()
    return c


@pytest.mark.parametrize("scheme", ["cycle", "sketch", "distance"])
def test_round_trip_answers_match(tmp_path, scheme):
    g = random_connected(random.Random(1), 25, 20, max_weight=4)
    path = tmp_path / "g.ftl"
    rep = label_graph(g, cfg(scheme), str(path))
    assert rep["file_bytes"] == path.stat().st_size
    r = LabelReader(str(path))
    assert r.scheme == scheme and r.header["n"] == 25
    rng = random.Random(2)
    for _ in range(20):
        s, t = rng.sample(range(1, 26), 2)
        F = [str(x) for x in rng.sample(range(g.m), 2)]
        rec = answer_query(r, s, t, F, g)
        assert rec["agree"]


@pytest.mark.parametrize("scheme", ["cycle", "sketch", "distance"])
def test_two_vertex_graph(tmp_path, scheme):
    g = build_graph([(1, 2, 1)])
    path = tmp_path / "two.ftl"
    label_graph(g, cfg(scheme, f=1), str(path))
    r = LabelReader(str(path))
    assert answer_query(r, 1, 2, [], g)["agree"]
    assert answer_query(r, 1, 2, ["1-2"], g)["agree"]


def test_edge_lookup_by_index_and_endpoints(tmp_path):
    g = random_connected(random.Random(3), 10, 5)
    path = tmp_path / "c.ftl"
    label_graph(g, cfg("cycle"), str(path))
    r = LabelReader(str(path))
    e = g.edges[4]
    assert r.edge(4) == r.edge(f"{e.v}-{e.u}")
    assert r.access_log == ["i:4", f"e:{min(e.key)}-{max(e.key)}"]
    with pytest.raises(MissingLabel):
        r.vertex(99)


def test_bad_files(tmp_path):
    bad = tmp_path / "bad"
    bad.write_bytes(b"nope" + bytes(20))
    with pytest.raises(BadConfig):
        LabelReader(str(bad))
    old = tmp_path / "old"
    old.write_bytes(MAGIC + struct.pack("<HI", 99, 2) + b"{}")
    with pytest.raises(BadConfig):
        LabelReader(str(old))
    with pytest.raises(BadConfig):
        write_label_file(str(tmp_path / "x"), "nope", {}, {}, {}, {})


def test_dump_json(tmp_path):
    import json

    g = build_graph([(1, 2), (2, 3)])
    path = tmp_path / "c.ftl"
    label_graph(g, cfg("cycle"), str(path))
    dump_json(str(path), str(tmp_path / "c.json"))
    doc = json.loads((tmp_path / "c.json").read_text())
    assert doc["header"]["scheme"] == "cycle"
    assert {"v:1", "v:2", "v:3", "e:1-2", "i:0"} <= set(doc["records"])


def test_graph_text_and_json_round_trip():
    g = random_connected(random.Random(4), 15, 10, max_weight=9)
    for h in (parse_graph_text(format_graph_text(g)), graph_from_json(graph_to_json(g))):
        assert h.n == g.n and h.edge_list() == g.edge_list()
