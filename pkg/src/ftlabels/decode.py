"""Decoding for the sketch-based labels.

Step 1 finds the components of T minus the faulty tree edges from ancestry
labels alone, Step 2 recovers each component's sketch, Step 3 removes the
faulty edges from those sketches and Step 4 runs Boruvka on the components,
reading basic unit ``p`` only in phase ``p``.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .errors import EmptyTreeFaults, MixedInstance, TooManyFaults
from .graph import AncestryLabel, is_ancestor
from .sketch import (
    ExtendedEdgeId,
    SketchEdgeLabel,
    SketchParams,
    SketchVertexLabel,
    edge_sketch,
    extract_outgoing_edge,
    unit_cells,
)

ROOT = 0
OPEN, CLOSE = 1, 2


@dataclass
class ComponentTree:
    """Components of T minus F_T; index 0 is the root's component.

    ``reps[c]`` is the id of the highest vertex of component ``c`` (0 for the
    root component, whose id the labels do not reveal) and ``anc[c]`` its
    ancestry label; the root component gets a sentinel interval.
    """

    reps: list[int]
    anc: list[AncestryLabel]
    parent: list[int]
    tuples: list[tuple[int, int, int]] = field(repr=False)
    _times: list[int] = field(repr=False, default_factory=list)

    def __post_init__(self):
        self._times = [tp[0] for tp in self.tuples]

    def __len__(self) -> int:
        return len(self.reps)

    def children(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in self.reps]
        for c, par in enumerate(self.parent):
            if par >= 0:
                out[par].append(c)
        return out

    def locate(self, anc: AncestryLabel) -> int:
        """Component of the vertex with this ancestry label."""
        pos = bisect_right(self._times, anc.dfs_in) - 1
        _, kind, c = self.tuples[pos]
        return c if kind == OPEN else self.parent[c]


def build_component_tree(lower: Sequence[tuple[int, AncestryLabel]]) -> ComponentTree:
    """Component tree from the child endpoints ``(id, anc)`` of the faulty tree edges."""
    if not lower:
        raise EmptyTreeFaults("no faulty tree edges")
    top = 1 << 64  # above every timestamp of the tree
    reps = [0] + [vid for vid, _ in lower]
    anc = [AncestryLabel(0, top)] + [a for _, a in lower]
    tuples = []
    for c, a in enumerate(anc):
        tuples.append((a.dfs_in, OPEN, c))
        tuples.append((a.dfs_out, CLOSE, c))
    tuples.sort()
    parent = [-1] * len(reps)
    prev = None
    for tp in tuples:
        time, kind, c = tp
        if kind == OPEN and c != ROOT:
            _, pkind, pc = prev
            parent[c] = pc if pkind == OPEN else parent[pc]
        prev = tp
    return ComponentTree(reps, anc, parent, tuples)


def naive_component_tree(lower: Sequence[tuple[int, AncestryLabel]]) -> list[int]:
    """Parent array by pairwise ancestry tests, for cross-checking."""
    parent = [-1] + [ROOT] * len(lower)
    for c, (_, a) in enumerate(lower, start=1):
        best = None
        for d, (_, b) in enumerate(lower, start=1):
            if d != c and is_ancestor(b, a) and (best is None or b.dfs_in > lower[best - 1][1].dfs_in):
                best = d
        if best is not None:
            parent[c] = best
    return parent


def naive_locate(lower: Sequence[tuple[int, AncestryLabel]], anc: AncestryLabel) -> int:
    best = ROOT
    best_in = -1
    for c, (_, a) in enumerate(lower, start=1):
        if is_ancestor(a, anc) and a.dfs_in > best_in:
            best, best_in = c, a.dfs_in
    return best


def component_sketches(ct: ComponentTree, temp: Sequence[int]) -> list[int]:
    """Sketch of each component in G from the subtree sketches of their heads."""
    out = list(temp)
    for c, par in enumerate(ct.parent):
        if par >= 0:
            out[par] ^= temp[c]
    return out


def cancel_faulty_edges(
    ct: ComponentTree,
    sketches: list[int],
    faults: Sequence[ExtendedEdgeId],
    p: SketchParams,
    seed_h: int,
) -> list[int]:
    """Remove each faulty edge crossing two components from both of their sketches."""
    out = list(sketches)
    fam = p.family(seed_h)
    for e in faults:
        cu = ct.locate(e.anc_u)
        cv = ct.locate(e.anc_v)
        if cu != cv:
            es = edge_sketch(p, fam, e)
            out[cu] ^= es
            out[cv] ^= es
    return out


class Segment(NamedTuple):
    kind: int  # 1: tree path inside one component, 0: a graph edge
    a: int
    b: int
    anc_a: AncestryLabel | None
    anc_b: AncestryLabel | None
    eid: ExtendedEdgeId | None = None


@dataclass
class SuccinctPath:
    segments: list[Segment]

    @property
    def recovery_edges(self) -> list[ExtendedEdgeId]:
        return [s.eid for s in self.segments if s.kind == 0]

    def vertices(self) -> list[int]:
        out = [self.segments[0].a]
        for s in self.segments:
            out.append(s.b)
        return out


class _UnionFind:
    __slots__ = ("parent", "size")

    def __init__(self, k: int):
        self.parent = list(range(k))
        self.size = [1] * k

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> tuple[int, int]:
        """Merge two roots; returns (survivor, absorbed)."""
        if self.size[a] < self.size[b] or (self.size[a] == self.size[b] and b < a):
            a, b = b, a
        self.parent[b] = a
        self.size[a] += self.size[b]
        return a, b


@dataclass
class BoruvkaRun:
    uf: _UnionFind
    merges: list[tuple[int, int, ExtendedEdgeId]]  # (component of x, component of y, edge)
    phases: int
    extracted: int = 0
    _adj: dict | None = field(default=None, repr=False)

    def same(self, a: int, b: int) -> bool:
        return self.uf.find(a) == self.uf.find(b)

    def forest(self) -> dict[int, list[tuple[int, ExtendedEdgeId]]]:
        """Merge forest as adjacency lists; built once per finished run."""
        if self._adj is None:
            adj: dict[int, list[tuple[int, ExtendedEdgeId]]] = {}
            for cx, cy, eid in self.merges:
                adj.setdefault(cx, []).append((cy, eid))
                adj.setdefault(cy, []).append((cx, eid))
            self._adj = adj
        return self._adj


def boruvka(
    ct: ComponentTree,
    sketches: Sequence[int],
    p: SketchParams,
    seed_id: int,
    stop_pair: tuple[int, int] | None = None,
) -> BoruvkaRun:
    """Merge components phase by phase; phase ``q`` reads only unit ``q``.

    Stops early once the two components in ``stop_pair`` are joined.
    """
    k = len(ct)
    uf = _UnionFind(k)
    sk = list(sketches)
    merges: list[tuple[int, int, ExtendedEdgeId]] = []
    run = BoruvkaRun(uf, merges, 0)
    if stop_pair is not None and uf.find(stop_pair[0]) == uf.find(stop_pair[1]):
        return run
    roots = list(range(k))
    for q in range(p.units):
        run.phases = q + 1
        found = []
        for r in roots:
            if not sk[r]:
                continue  # no outgoing edge survives in any unit
            eid = extract_outgoing_edge(unit_cells(sk[r], p, q), p, seed_id)
            if eid is None:
                continue
            run.extracted += 1
            cx = ct.locate(eid.anc_u)
            cy = ct.locate(eid.anc_v)
            found.append((cx, cy, eid))
        for cx, cy, eid in found:
            rx, ry = uf.find(cx), uf.find(cy)
            if rx == ry:
                continue
            keep, gone = uf.union(rx, ry)
            sk[keep] ^= sk[gone]
            merges.append((cx, cy, eid))
            if stop_pair is not None and uf.find(stop_pair[0]) == uf.find(stop_pair[1]):
                return run
        roots = sorted({uf.find(c) for c in range(k)})
        if len(roots) == 1 or not any(sk[r] for r in roots):
            break  # nothing left that any later phase could extract
    return run


def succinct_path(
    run: BoruvkaRun,
    ct: ComponentTree,
    s: tuple[int, AncestryLabel],
    t: tuple[int, AncestryLabel],
) -> SuccinctPath:
    """Alternating 1/0 segments along the merge forest from comp(s) to comp(t)."""
    cs = ct.locate(s[1])
    target = ct.locate(t[1])
    adj = run.forest()
    prev: dict[int, tuple[int, ExtendedEdgeId] | None] = {cs: None}
    stack = [cs]
    while stack:
        c = stack.pop()
        for d, eid in adj.get(c, ()):
            if d not in prev:
                prev[d] = (c, eid)
                stack.append(d)
    hops = []
    c = target
    while prev[c] is not None:
        pc, eid = prev[c]
        hops.append((pc, c, eid))
        c = pc
    hops.reverse()
    segs = []
    cur_id, cur_anc = s
    for pc, c, eid in hops:
        # orient the edge from component pc to component c
        if ct.locate(eid.anc_u) == pc:
            x, xa, y, ya = eid.id_u, eid.anc_u, eid.id_v, eid.anc_v
        else:
            x, xa, y, ya = eid.id_v, eid.anc_v, eid.id_u, eid.anc_u
        segs.append(Segment(1, cur_id, x, cur_anc, xa))
        segs.append(Segment(0, x, y, xa, ya, eid))
        cur_id, cur_anc = y, ya
    segs.append(Segment(1, cur_id, t[0], cur_anc, t[1]))
    return SuccinctPath(segs)


@dataclass
class DecodeResult:
    connected: bool
    path: SuccinctPath | None = None
    phases: int = 0


def _check(ls: SketchVertexLabel, lt: SketchVertexLabel, lf: Sequence[SketchEdgeLabel], f: int | None):
    if f is not None and len(lf) > f:
        raise TooManyFaults(f"{len(lf)} faults, scheme tolerates {f}")
    tags = {ls.instance, lt.instance} | {l.instance for l in lf}
    if len(tags) > 1:
        raise MixedInstance("labels come from different sketch-label instances")


class FaultSetSketchDecoder:
    """Steps 1-3 for one fault set, shared by any number of (s, t) queries."""

    def __init__(self, lf: Sequence[SketchEdgeLabel], f: int | None = None):
        if f is not None and len(lf) > f:
            raise TooManyFaults(f"{len(lf)} faults, scheme tolerates {f}")
        if len({l.instance for l in lf}) > 1:
            raise MixedInstance("labels come from different sketch-label instances")
        seen = set()
        self.faults = []
        for l in lf:
            key = (l.eid.id_u, l.eid.id_v)
            if key not in seen:
                seen.add(key)
                self.faults.append(l)
        tree = [l for l in self.faults if l.is_tree_edge]
        self.tree_faults = tree
        self.ct = None
        self.sketches = None
        if not tree:
            return
        first = tree[0]
        self.params = first.params
        self.seeds = first.seeds
        lower = []
        temp = [first.sketch_all]
        for l in tree:
            anc, sk = l.lower()
            lower.append((l.lower_id(), anc))
            temp.append(sk)
        self.ct = build_component_tree(lower)
        base = component_sketches(self.ct, temp)
        self.sketches = cancel_faulty_edges(
            self.ct, base, [l.eid for l in self.faults], self.params, self.seeds.seed_h
        )
        self._full: BoruvkaRun | None = None

    def decode(self, ls: SketchVertexLabel, lt: SketchVertexLabel, want_path: bool = True,
               early_exit: bool = True) -> DecodeResult:
        _check(ls, lt, self.faults, None)
        if self.ct is None:
            path = SuccinctPath([Segment(1, ls.vid, lt.vid, ls.anc, lt.anc)])
            return DecodeResult(True, path if want_path else None)
        cs = self.ct.locate(ls.anc)
        ct_ = self.ct.locate(lt.anc)
        if early_exit:
            run = boruvka(self.ct, self.sketches, self.params, self.seeds.seed_id, (cs, ct_))
        else:
            run = self.full_run()
        ok = run.same(cs, ct_)
        path = None
        if ok and want_path:
            path = succinct_path(run, self.ct, (ls.vid, ls.anc), (lt.vid, lt.anc))
        return DecodeResult(ok, path, run.phases)


    def full_run(self) -> BoruvkaRun | None:
        """Boruvka without early exit; its merges extend every early-exit run."""
        if self.ct is None:
            return None
        if self._full is None:
            self._full = boruvka(self.ct, self.sketches, self.params, self.seeds.seed_id)
        return self._full

    def classes(self, vlabels: Sequence[SketchVertexLabel]) -> list[int]:
        """Final component of each vertex; equal entries mean connected."""
        run = self.full_run()
        if run is None:
            return [0] * len(vlabels)
        return [run.uf.find(self.ct.locate(v.anc)) for v in vlabels]


def sketch_decode(
    ls: SketchVertexLabel,
    lt: SketchVertexLabel,
    lf: Sequence[SketchEdgeLabel],
    f: int | None = None,
    want_path: bool = True,
) -> DecodeResult:
    """Connectivity of s and t in G minus F from the labels of s, t and F."""
    _check(ls, lt, lf, f)
    return FaultSetSketchDecoder(lf).decode(ls, lt, want_path)
