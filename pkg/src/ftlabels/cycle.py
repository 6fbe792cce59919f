"""Connectivity labels from cycle-space sampling.

Every non-tree edge draws ``b`` random bits; a tree edge gets the XOR of the
bits of all non-tree edges whose fundamental cycle passes through it.  Column
``j`` of the bit vectors is then a uniformly random binary circulation, so the
XOR over an edge set is zero for every induced cut and is zero for a non-cut
only with probability ``2**-b``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import Disconnected, MixedInstance, TooManyFaults
from .gf2 import Gf2Matrix, gf2_solve, kernel_basis, parity
from .graph import AncestryLabel, Graph, SpanningTree, is_ancestor
from .sampling import digest_tag as instance_tag
from .sketch import stamp_bits

DEFAULT_SLACK = 40

# the two selector rows sit below the b random rows
W1 = 1  # tree edge on root..s but not root..t
W2 = 2  # tree edge on root..t but not root..s


def default_bits(f: int) -> int:
    return f + DEFAULT_SLACK


def ancestry_bits(n: int) -> int:
    """Fixed part of an edge label: two ancestry labels and the tree flag."""
    return 4 * stamp_bits(n) + 1


def cycle_label_bits(b: int, n: int) -> int:
    return b + ancestry_bits(n)


@dataclass(frozen=True)
class CycleLabel:
    phi: int
    b: int
    is_tree_edge: bool
    anc_u: AncestryLabel
    anc_v: AncestryLabel
    u: int
    v: int
    instance: int

    def to_json(self) -> dict:
        width = (self.b + 3) // 4
        return {
            "edge": [self.u, self.v],
            "phi": format(self.phi, f"0{width}x"),
            "tree": self.is_tree_edge,
            "anc_u": list(self.anc_u),
            "anc_v": list(self.anc_v),
            "b": self.b,
            "instance": self.instance,
        }

    @classmethod
    def from_json(cls, d: dict) -> "CycleLabel":
        return cls(
            int(d["phi"], 16),
            d["b"],
            d["tree"],
            AncestryLabel(*d["anc_u"]),
            AncestryLabel(*d["anc_v"]),
            d["edge"][0],
            d["edge"][1],
            d["instance"],
        )


@dataclass(frozen=True)
class VertexCycleLabel:
    anc: AncestryLabel
    vid: int
    n: int
    instance: int

    def to_json(self) -> dict:
        return {"id": self.vid, "anc": list(self.anc), "n": self.n, "instance": self.instance}

    @classmethod
    def from_json(cls, d: dict) -> "VertexCycleLabel":
        return cls(AncestryLabel(*d["anc"]), d["id"], d["n"], d["instance"])


def assign_cycle_labels(
    g: Graph,
    t: SpanningTree,
    b: int,
    seed: int,
    edges: Iterable[int] | None = None,
) -> tuple[dict[int, CycleLabel], dict[int, VertexCycleLabel]]:
    """Label every edge of the instance and every vertex of ``t``.

    ``edges`` restricts the instance to a subgraph spanned by ``t`` (default:
    all of ``g``, in which case ``t`` must span ``g``).
    """
    if b < 1:
        raise ValueError("b must be positive")
    if edges is None:
        if t.size != g.n:
            raise Disconnected([list(t.vertices)])
        edge_ids = list(range(g.m))
    else:
        edge_ids = sorted(edges)
    tag = instance_tag("cycle", seed, b, t.root, t.size, len(edge_ids))
    rng = random.Random(seed)

    phi: dict[int, int] = {}
    acc = {v: 0 for v in t.vertices}
    for idx in edge_ids:
        if t.is_tree_edge(idx):
            continue
        e = g.edges[idx]
        bits = rng.getrandbits(b)
        phi[idx] = bits
        acc[e.u] ^= bits
        acc[e.v] ^= bits

    # tree edge above x: XOR of acc over subtree(x), since inner edges cancel
    order = sorted(t.vertices, key=t.dfs_in.__getitem__, reverse=True)
    for x in order:
        pe = t.parent[x]
        if pe is not None:
            phi[pe[1]] = acc[x]
            acc[pe[0]] ^= acc[x]

    labels = {}
    for idx in edge_ids:
        e = g.edges[idx]
        labels[idx] = CycleLabel(
            phi[idx], b, t.is_tree_edge(idx), t.anc(e.u), t.anc(e.v), e.u, e.v, tag
        )
    vlabels = {v: VertexCycleLabel(t.anc(v), v, t.size, tag) for v in t.vertices}
    return labels, vlabels


def _check_instance(labels: Sequence[CycleLabel], extra: Sequence[VertexCycleLabel] = ()) -> None:
    tags = {l.instance for l in labels} | {v.instance for v in extra}
    widths = {l.b for l in labels}
    if len(tags) > 1 or len(widths) > 1:
        raise MixedInstance("labels come from different cycle-label instances")


def is_induced_cut(labels: Sequence[CycleLabel]) -> bool:
    """True iff the XOR of the labels is zero (always true for a real cut)."""
    _check_instance(labels)
    acc = 0
    for l in labels:
        acc ^= l.phi
    return acc == 0


def _on_root_path(l: CycleLabel, anc: AncestryLabel) -> bool:
    return l.is_tree_edge and is_ancestor(l.anc_u, anc) and is_ancestor(l.anc_v, anc)


def extended_column(l: CycleLabel, s: AncestryLabel, t: AncestryLabel) -> int:
    """phi'(e): two selector bits, then phi(e)."""
    on_s = _on_root_path(l, s)
    on_t = _on_root_path(l, t)
    sel = W1 if on_s and not on_t else W2 if on_t and not on_s else 0
    return l.phi << 2 | sel


def cycle_decode(
    vs: VertexCycleLabel,
    vt: VertexCycleLabel,
    fl: Sequence[CycleLabel],
    f: int | None = None,
) -> bool:
    """Connectivity of s and t after deleting the edges of ``fl``.

    s and t are separated iff some subset of the faults XORs to zero and
    crosses the root paths of s and t with different parities, which is the
    solvability of ``A x = w1`` or ``A x = w2``.
    """
    if f is not None and len(fl) > f:
        raise TooManyFaults(f"{len(fl)} faults, scheme tolerates {f}")
    _check_instance(fl, (vs, vt))
    if not fl:
        return True
    b = fl[0].b
    a = Gf2Matrix(b + 2, tuple(extended_column(l, vs.anc, vt.anc) for l in fl))
    return gf2_solve(a, W1) is None and gf2_solve(a, W2) is None


class FaultSetDecoder:
    """Answers many (s, t) queries for one fault set with a single elimination.

    The kernel of the fault columns is exactly the family of fault subsets that
    are induced cuts; s and t are separated iff some kernel vector meets their
    root paths with different parity.  So each vertex gets a signature (one
    parity per kernel basis vector) and two vertices are connected iff their
    signatures agree.
    """

    def __init__(self, fl: Sequence[CycleLabel], f: int | None = None):
        if f is not None and len(fl) > f:
            raise TooManyFaults(f"{len(fl)} faults, scheme tolerates {f}")
        _check_instance(fl)
        self.faults = list(fl)
        self.kernel = kernel_basis([l.phi for l in fl])

    def signature(self, v: VertexCycleLabel) -> int:
        above = 0
        for j, l in enumerate(self.faults):
            if _on_root_path(l, v.anc):
                above |= 1 << j
        sig = 0
        for q, z in enumerate(self.kernel):
            sig |= parity(z & above) << q
        return sig

    def connected(self, vs: VertexCycleLabel, vt: VertexCycleLabel) -> bool:
        return self.signature(vs) == self.signature(vt)


# -- vectorized evaluation over many fault sets ---------------------------------


def root_path_masks(
    labels: Sequence[CycleLabel], vlabels: Sequence[VertexCycleLabel]
) -> list[int]:
    """For each edge label, the bitmask of vertex positions whose root path it lies on."""
    out = []
    for l in labels:
        mask = 0
        if l.is_tree_edge:
            for pos, vl in enumerate(vlabels):
                if _on_root_path(l, vl.anc):
                    mask |= 1 << pos
        out.append(mask)
    return out


def batch_signatures(phi, above, faults):
    """Vertex signatures for every row of ``faults`` at once.

    ``phi`` and ``above`` are uint64 arrays indexed by edge (label bits and
    root-path masks); ``faults`` is an ``(N, k)`` integer array, one fault set
    per row.  Rather than eliminating, all ``2**k - 1`` nonzero selections ``x``
    are tried, which decides the same systems ``A x = w1``/``A x = w2`` exactly.
    Returns an ``(N, nv)`` array; s and t are connected iff their columns agree.
    """
    import numpy as np

    faults = np.asarray(faults, dtype=np.int64)
    rows, k = faults.shape
    if k > 5:
        raise ValueError("exhaustive selection supports at most 5 faults")
    nv = max(1, max(int(a).bit_length() for a in above))
    fphi = phi[faults]
    fabove = above[faults]
    sig = np.zeros((rows, nv), dtype=np.uint32)
    shifts = np.arange(nv, dtype=np.uint64)
    for x in range(1, 1 << k):
        acc_phi = np.zeros(rows, dtype=np.uint64)
        acc_side = np.zeros(rows, dtype=np.uint64)
        for j in range(k):
            if x >> j & 1:
                acc_phi ^= fphi[:, j]
                acc_side ^= fabove[:, j]
        cut = acc_phi == 0
        if not cut.any():
            continue
        bits = (acc_side[cut, None] >> shifts) & np.uint64(1)
        sig[cut] |= bits.astype(np.uint32) << np.uint32(x - 1)
    return sig
