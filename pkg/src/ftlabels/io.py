"""Label files: one file per labelled graph, read one record at a time.

Layout (little-endian)::

    magic "FTLB" | u16 version | u32 header length | header JSON
    u32 index count | index entries (u16 key length, key, u64 offset, u32 length)
    record blobs

The header carries the instance parameters (scheme, n, m, f, sketch units,
UID width, seeds).  Records are JSON blobs keyed ``v:<id>`` for vertices and
``e:<u>-<v>`` for edges, with ``i:<index>`` aliases pointing at the same
edge blob.  ``LabelReader`` logs every record it reads so tests can audit
exactly which labels a query touched.
"""

from __future__ import annotations

import json
import struct
from dataclasses import asdict
from typing import Iterable

from .cycle import CycleLabel, VertexCycleLabel
from .distance import DistEdgeLabel, DistVertexLabel
from .errors import BadConfig, MissingLabel
from .graph import AncestryLabel
from .sampling import SeedPair
from .sketch import ExtendedEdgeId, SketchEdgeLabel, SketchParams, SketchVertexLabel

MAGIC = b"FTLB"
VERSION = 1


def _hex(x: int | None) -> str | None:
    return None if x is None else format(x, "x")


def _unhex(s: str | None) -> int | None:
    return None if s is None else int(s, 16)


# -- record codecs -----------------------------------------------------------------


def sketch_vertex_to_json(l: SketchVertexLabel) -> dict:
    return {"id": l.vid, "anc": list(l.anc), "instance": l.instance}


def sketch_vertex_from_json(d: dict) -> SketchVertexLabel:
    return SketchVertexLabel(AncestryLabel(*d["anc"]), d["id"], d["instance"])


def params_to_json(p: SketchParams) -> dict:
    return asdict(p)


def params_from_json(d: dict) -> SketchParams:
    return SketchParams(**d)


def eid_to_json(e: ExtendedEdgeId) -> dict:
    return {
        "uid": _hex(e.uid),
        "ids": [e.id_u, e.id_v],
        "anc_u": list(e.anc_u),
        "anc_v": list(e.anc_v),
        "extra": _hex(e.extra),
    }


def eid_from_json(d: dict) -> ExtendedEdgeId:
    return ExtendedEdgeId(
        _unhex(d["uid"]),
        d["ids"][0],
        d["ids"][1],
        AncestryLabel(*d["anc_u"]),
        AncestryLabel(*d["anc_v"]),
        _unhex(d["extra"]),
    )


def sketch_edge_to_json(l: SketchEdgeLabel) -> dict:
    d = {
        "eid": eid_to_json(l.eid),
        "tree": l.is_tree_edge,
        "seeds": [l.seeds.seed_id, l.seeds.seed_h],
        "params": params_to_json(l.params),
        "instance": l.instance,
    }
    if l.is_tree_edge:
        d["sketch_u"] = _hex(l.sketch_u)
        d["sketch_v"] = _hex(l.sketch_v)
        d["sketch_all"] = _hex(l.sketch_all)
    return d


def sketch_edge_from_json(d: dict) -> SketchEdgeLabel:
    return SketchEdgeLabel(
        eid_from_json(d["eid"]),
        d["tree"],
        SeedPair(*d["seeds"]),
        params_from_json(d["params"]),
        d["instance"],
        _unhex(d.get("sketch_u")),
        _unhex(d.get("sketch_v")),
        _unhex(d.get("sketch_all")),
    )


def dist_vertex_to_json(l: DistVertexLabel) -> dict:
    return {
        "id": l.vid,
        "k": l.k,
        "home": list(l.home),
        "scheme": l.scheme,
        "entries": [[i, j, sketch_vertex_to_json(x)] for i, j, x in l.entries],
    }


def dist_vertex_from_json(d: dict) -> DistVertexLabel:
    return DistVertexLabel(
        d["id"],
        d["k"],
        tuple(d["home"]),
        tuple((i, j, sketch_vertex_from_json(x)) for i, j, x in d["entries"]),
        d["scheme"],
    )


def dist_edge_to_json(l: DistEdgeLabel) -> dict:
    return {
        "edge": [l.u, l.v],
        "scheme": l.scheme,
        "entries": [[i, j, sketch_edge_to_json(x)] for i, j, x in l.entries],
    }


def dist_edge_from_json(d: dict) -> DistEdgeLabel:
    return DistEdgeLabel(
        d["edge"][0],
        d["edge"][1],
        tuple((i, j, sketch_edge_from_json(x)) for i, j, x in d["entries"]),
        d["scheme"],
    )


CODECS = {
    "cycle": (VertexCycleLabel.to_json, VertexCycleLabel.from_json, CycleLabel.to_json, CycleLabel.from_json),
    "sketch": (sketch_vertex_to_json, sketch_vertex_from_json, sketch_edge_to_json, sketch_edge_from_json),
    "distance": (dist_vertex_to_json, dist_vertex_from_json, dist_edge_to_json, dist_edge_from_json),
}


# -- container -----------------------------------------------------------------------


def write_label_file(
    path: str,
    scheme: str,
    header: dict,
    vertex_labels: dict[int, object],
    edge_labels: dict[int, object],
    edge_ends: dict[int, tuple[int, int]],
) -> int:
    """Write a label file; returns its size in bytes."""
    if scheme not in CODECS:
        raise BadConfig(f"unknown scheme {scheme!r}")
    vto, _, eto, _ = CODECS[scheme]
    blobs: list[bytes] = []
    keys: list[tuple[list[str], int]] = []
    for v in sorted(vertex_labels):
        keys.append(([f"v:{v}"], len(blobs)))
        blobs.append(json.dumps(vto(vertex_labels[v]), separators=(",", ":")).encode())
    for idx in sorted(edge_labels):
        a, b = sorted(edge_ends[idx])
        keys.append(([f"e:{a}-{b}", f"i:{idx}"], len(blobs)))
        blobs.append(json.dumps(eto(edge_labels[idx]), separators=(",", ":")).encode())
    head = json.dumps({"scheme": scheme, **header}, sort_keys=True).encode()
    index = []
    for names, bi in keys:
        for name in names:
            index.append((name.encode(), bi))
    index_size = 4 + sum(2 + len(k) + 8 + 4 for k, _ in index)
    base = 4 + 2 + 4 + len(head) + index_size
    offsets = []
    pos = base
    for blob in blobs:
        offsets.append(pos)
        pos += len(blob)
    with open(path, "wb") as fh:
        fh.write(MAGIC + struct.pack("<HI", VERSION, len(head)) + head)
        fh.write(struct.pack("<I", len(index)))
        for key, bi in index:
            fh.write(struct.pack("<H", len(key)) + key + struct.pack("<QI", offsets[bi], len(blobs[bi])))
        for blob in blobs:
            fh.write(blob)
    return pos


class LabelReader:
    """Random access to single label records, with an access log."""

    def __init__(self, path: str):
        self.path = path
        self.access_log: list[str] = []
        with open(path, "rb") as fh:
            magic = fh.read(4)
            if magic != MAGIC:
                raise BadConfig(f"{path} is not a label file")
            version, hlen = struct.unpack("<HI", fh.read(6))
            if version != VERSION:
                raise BadConfig(f"label file version {version} unsupported")
            self.header = json.loads(fh.read(hlen))
            (count,) = struct.unpack("<I", fh.read(4))
            self.index: dict[str, tuple[int, int]] = {}
            for _ in range(count):
                (klen,) = struct.unpack("<H", fh.read(2))
                key = fh.read(klen).decode()
                off, ln = struct.unpack("<QI", fh.read(12))
                self.index[key] = (off, ln)
        self.scheme = self.header["scheme"]
        _, self._vfrom, _, self._efrom = CODECS[self.scheme]

    def _raw(self, key: str) -> dict:
        if key not in self.index:
            raise MissingLabel(f"no label {key!r} in {self.path}")
        off, ln = self.index[key]
        self.access_log.append(key)
        with open(self.path, "rb") as fh:
            fh.seek(off)
            return json.loads(fh.read(ln))

    def vertex(self, v: int):
        return self._vfrom(self._raw(f"v:{v}"))

    def edge(self, ref: str | int):
        """Edge label by index (``7``) or by endpoints (``"3-9"``)."""
        if isinstance(ref, int) or str(ref).isdigit():
            return self._efrom(self._raw(f"i:{int(ref)}"))
        a, b = sorted(int(x) for x in str(ref).split("-"))
        return self._efrom(self._raw(f"e:{a}-{b}"))

    def touched(self) -> set[str]:
        return set(self.access_log)


def dump_json(path: str, out: str, keys: Iterable[str] | None = None) -> None:
    """Debug mirror of a label file as one JSON document (not audited)."""
    r = LabelReader(path)
    names = sorted(r.index) if keys is None else list(keys)
    doc = {"header": r.header, "records": {k: r._raw(k) for k in names}}
    with open(out, "w") as fh:
        json.dump(doc, fh, indent=1)
