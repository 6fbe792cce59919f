"""Command-line front end: ``ftlabels generate | label | query | route``.

Exit codes: 0 ok, 2 a message could not be delivered, 3 bad configuration or
input (also used for argument errors).
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .cycle import FaultSetDecoder, assign_cycle_labels, cycle_label_bits, default_bits
from .decode import sketch_decode
from .distance import assign_dist_labels, dist_decode
from .errors import BadConfig, BadSpec, FTLabelError, GraphError, MissingLabel, TooManyFaults
from .graph import Graph, format_graph_text, graph_from_json, parse_graph_text, spanning_tree
from .io import LabelReader, write_label_file
from .oracle import FixtureSpec, make_fixture, oracle_connected, oracle_distance
from .sampling import SeedPair
from .sketch import SketchParams, assign_sketch_labels, edge_label_bits, stamp_bits, vertex_label_bits

EXIT_OK = 0
EXIT_UNDELIVERED = 2
EXIT_CONFIG = 3

SCHEMES = ("cycle", "sketch", "distance")


@dataclass
class RunConfig:
    scheme: str = "cycle"
    f: int = 2
    k: int = 2
    b: int | None = None
    L: int | None = None
    lam: int | None = None
    seed: int = 0
    fmt: str = "json"

    def validate(self) -> "RunConfig":
        if self.scheme not in SCHEMES:
            raise BadConfig(f"scheme must be one of {SCHEMES}")
        if not 0 <= self.f <= 64:
            raise BadConfig("f must be in 0..64")
        if not 1 <= self.k <= 16:
            raise BadConfig("k must be in 1..16")
        if self.b is not None and not 1 <= self.b <= 4096:
            raise BadConfig("b must be in 1..4096")
        if self.L is not None and not 1 <= self.L <= 1024:
            raise BadConfig("L must be in 1..1024")
        if self.lam is not None and not 8 <= self.lam <= 512:
            raise BadConfig("lambda must be in 8..512")
        if self.fmt not in ("json", "table"):
            raise BadConfig("format must be json or table")
        return self

    @property
    def bits(self) -> int:
        return default_bits(self.f) if self.b is None else self.b


def _config(args) -> RunConfig:
    return RunConfig(
        getattr(args, "scheme", None) or "cycle",
        args.f,
        args.k,
        getattr(args, "b", None),
        getattr(args, "L", None),
        getattr(args, "lam", None),
        args.seed,
        args.format,
    ).validate()


# -- input helpers -----------------------------------------------------------------


def load_graph(path: str) -> Graph:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise BadConfig(f"cannot read graph {path}: {exc}") from exc
    try:
        if text.lstrip().startswith("{"):
            return graph_from_json(text)
        return parse_graph_text(text)
    except (ValueError, KeyError, GraphError) as exc:
        raise BadConfig(f"bad graph file {path}: {exc}") from exc


def parse_query(text: str) -> tuple[int, int, list[str]]:
    toks = text.split()
    if len(toks) < 2:
        raise BadConfig("a query is 's t [e1 e2 ...]'")
    try:
        s, t = int(toks[0]), int(toks[1])
    except ValueError as exc:
        raise BadConfig(f"bad query {text!r}") from exc
    for e in toks[2:]:
        parts = e.split("-")
        if not all(p.isdigit() for p in parts) or len(parts) > 2:
            raise BadConfig(f"edge {e!r} is neither an index nor u-v")
    return s, t, toks[2:]


def edge_index(g: Graph, ref: str) -> int:
    if "-" in ref:
        u, v = (int(x) for x in ref.split("-"))
        if not g.has_edge(u, v):
            raise BadConfig(f"no edge {ref} in the graph")
        return g.edge_id(u, v)
    idx = int(ref)
    if not 0 <= idx < g.m:
        raise BadConfig(f"edge index {idx} outside 0..{g.m - 1}")
    return idx


def random_queries(g: Graph, f: int, count: int, seed: int) -> list[tuple[int, int, list[str]]]:
    rng = random.Random(f"queries:{seed}")
    out = []
    for _ in range(count):
        s, t = rng.sample(range(1, g.n + 1), 2) if g.n > 1 else (1, 1)
        F = rng.sample(range(g.m), min(g.m, rng.randint(0, f)))
        out.append((s, t, [str(x) for x in F]))
    return out


def emit(records: Sequence[dict], fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        for r in records:
            print(json.dumps(r, default=str), file=out)
        return
    if not records:
        return
    cols = list(records[0])
    rows = [[_cell(r.get(c)) for c in cols] for r in records]
    widths = [max(len(c), *(len(row[i]) for row in rows)) for i, c in enumerate(cols)]
    print("  ".join(c.ljust(w) for c, w in zip(cols, widths)), file=out)
    for row in rows:
        print("  ".join(x.ljust(w) for x, w in zip(row, widths)), file=out)


def _cell(x) -> str:
    if isinstance(x, float):
        return f"{x:.3f}"
    if isinstance(x, (list, dict)):
        return json.dumps(x)
    return str(x)


# -- generate ----------------------------------------------------------------------------


def cmd_generate(args) -> int:
    try:
        spec = json.loads(Path(args.fixture).read_text()) if Path(args.fixture).is_file() else json.loads(args.fixture)
    except (OSError, json.JSONDecodeError) as exc:
        raise BadConfig(f"fixture must be JSON or a JSON file: {exc}") from exc
    try:
        fx = make_fixture(FixtureSpec.from_dict(spec))
    except (BadSpec, TypeError) as exc:
        raise BadConfig(str(exc)) from exc
    text = format_graph_text(fx.graph)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    info = {"n": fx.graph.n, "m": fx.graph.m, "s": fx.s, "t": fx.t}
    print(json.dumps(info), file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


# -- label ---------------------------------------------------------------------------------


def log3(n: int) -> float:
    return math.log2(max(n, 2)) ** 3


def label_graph(g: Graph, cfg: RunConfig, out: str) -> dict:
    """Label ``g`` with the configured scheme, write the file, return a size report."""
    rep: dict = {"scheme": cfg.scheme, "n": g.n, "m": g.m, "f": cfg.f}
    ends = {idx: (e.u, e.v) for idx, e in enumerate(g.edges)}
    if cfg.scheme == "cycle":
        t = spanning_tree(g)
        el, vl = assign_cycle_labels(g, t, cfg.bits, cfg.seed)
        header = {"n": g.n, "m": g.m, "f": cfg.f, "b": cfg.bits, "seed": cfg.seed}
        edge_bits = cycle_label_bits(cfg.bits, g.n)
        rep.update(
            b=cfg.bits,
            edge_bits=edge_bits,
            vertex_bits=2 * stamp_bits(g.n) + g.n.bit_length(),
            closed_form="b + ancestry = f + O(log n)",
            closed_form_bits=cfg.f + math.log2(max(g.n, 2)),
        )
    elif cfg.scheme == "sketch":
        t = spanning_tree(g)
        rng = random.Random(f"sketch:{cfg.seed}")
        seeds = SeedPair(rng.getrandbits(64), rng.getrandbits(64))
        vl, el = assign_sketch_labels(g, t, seeds, units=cfg.L, lam=cfg.lam)
        p = next(iter(el.values())).params if el else SketchParams.for_graph(g.n, 0, cfg.L, cfg.lam)
        header = {
            "n": g.n, "m": g.m, "f": cfg.f, "units": p.units, "lam": p.lam,
            "seed": cfg.seed, "seed_id": seeds.seed_id, "seed_h": seeds.seed_h,
        }
        rep.update(
            units=p.units,
            lam=p.lam,
            vertex_bits=vertex_label_bits(p),
            edge_bits=edge_label_bits(p, True),
            nontree_edge_bits=edge_label_bits(p, False),
            closed_form="O(log^3 n)",
            closed_form_bits=log3(g.n),
        )
    else:
        lab = assign_dist_labels(g, cfg.f, cfg.k, cfg.seed)
        vl, el = lab.vertex, lab.edge
        header = {"n": g.n, "m": g.m, "f": cfg.f, "k": cfg.k, "scales": lab.scales, "seed": cfg.seed}
        rep.update(
            k=cfg.k,
            scales=lab.scales,
            vertex_bits=max(lab.vertex_bits(v) for v in g.vertices),
            edge_bits=max(lab.edge_bits(i) for i in range(g.m)),
            closed_form="O(k n^(1/k) log(nW) log^3 n)",
            closed_form_bits=lab.bound(g.n, int(log3(g.n))),
        )
    rep["file_bytes"] = write_label_file(out, cfg.scheme, header, vl, el, ends)
    rep["ratio"] = rep["edge_bits"] / rep["closed_form_bits"]
    return rep


def cmd_label(args) -> int:
    cfg = _config(args)
    g = load_graph(args.graph)
    if not args.labels:
        raise BadConfig("--labels PATH is required")
    rep = label_graph(g, cfg, args.labels)
    emit([rep], cfg.fmt)
    return EXIT_OK


# -- query ---------------------------------------------------------------------------------


def answer_query(reader: LabelReader, s: int, t: int, F: Sequence[str], g: Graph | None = None) -> dict:
    """Decode one query from the labels of s, t and F only; compare with the oracle if ``g``."""
    h = reader.header
    scheme = reader.scheme
    start = len(reader.access_log)
    ls, lt = reader.vertex(s), reader.vertex(t)
    lf = [reader.edge(e) for e in F]
    touched = reader.access_log[start:]
    rec: dict = {"query": " ".join([str(s), str(t), *F])}
    if scheme == "cycle":
        if len(lf) > h["f"]:
            raise TooManyFaults(f"{len(lf)} faults, labels built for f={h['f']}")
        rec["connected"] = FaultSetDecoder(lf).connected(ls, lt)
    elif scheme == "sketch":
        rec["connected"] = sketch_decode(ls, lt, lf, f=h["f"], want_path=False).connected
    else:
        est = dist_decode(ls, lt, lf, f=h["f"])
        rec["estimate"] = est.value if est.finite else "inf"
    if g is not None:
        idx = [edge_index(g, e) for e in F]
        if scheme == "distance":
            d = oracle_distance(g, idx, s, t)
            nf = len(set(idx))
            rec["oracle"] = d if d != math.inf else "inf"
            if d == math.inf:
                rec["agree"] = rec["estimate"] == "inf"
            else:
                rec["agree"] = rec["estimate"] != "inf" and d <= rec["estimate"] <= (8 * h["k"] - 2) * (nf + 1) * d
        else:
            rec["oracle"] = oracle_connected(g, idx, s, t)
            rec["agree"] = rec["oracle"] == rec["connected"]
    rec["labels_read"] = touched
    return rec


def allowed_keys(s: int, t: int, F: Sequence[str]) -> set[str]:
    keys = {f"v:{s}", f"v:{t}"}
    for e in F:
        if "-" in e:
            a, b = sorted(int(x) for x in e.split("-"))
            keys.add(f"e:{a}-{b}")
        else:
            keys.add(f"i:{int(e)}")
    return keys


def cmd_query(args) -> int:
    if not args.labels:
        raise BadConfig("--labels PATH is required")
    try:
        reader = LabelReader(args.labels)
    except OSError as exc:
        raise BadConfig(f"cannot open labels {args.labels}: {exc}") from exc
    if args.scheme and args.scheme != reader.scheme:
        raise BadConfig(f"label file holds {reader.scheme} labels, not {args.scheme}")
    g = load_graph(args.graph) if args.graph else None
    if args.query:
        queries = [parse_query(args.query)]
    elif args.batch:
        if g is None:
            raise BadConfig("--batch needs --graph to draw queries")
        queries = random_queries(g, reader.header["f"], args.batch, args.seed)
    else:
        raise BadConfig("give --query or --batch")
    records = []
    for s, t, F in queries:
        rec = answer_query(reader, s, t, F, g)
        rec["local"] = set(rec["labels_read"]) <= allowed_keys(s, t, F)
        records.append(rec)
    emit(records, args.format)
    if len(records) > 1:
        summary = {"queries": len(records), "local": sum(r["local"] for r in records)}
        if g is not None:
            summary["agree"] = sum(r["agree"] for r in records)
        emit([summary], args.format)
    return EXIT_OK


# -- route ---------------------------------------------------------------------------------


def run_route(state, s: int, t: int, F: Sequence[int], known: bool) -> dict:
    from .routing.simulator import Network, measure_stretch, route_known, route_unknown

    net = Network(state, F)
    if known:
        fl = [state.known_edge_label(i) for i in sorted(set(F))]
        trace = route_known(net, s, state.known_vertex_label(t), fl)
        bound = (8 * state.k - 2) * (len(set(F)) + 1)
    else:
        trace = route_unknown(net, s, state.routing_label(t))
        bound = 32 * state.k * (len(set(F)) + 1) ** 2
    rec = trace.to_dict()
    rec["query"] = " ".join(str(x) for x in [s, t, *F])
    rec["stretch"] = None
    if trace.delivered:
        st: Fraction = measure_stretch(trace, state.g, F)
        rec["stretch"] = float(st)
        rec["stretch_bound"] = bound
    else:
        rec["reachable"] = oracle_connected(state.g, F, s, t)
    order = ["query", "delivered", "hops", "weight", "stretch", "faults_discovered", "phases"]
    return {k: rec[k] for k in order} | {k: v for k, v in rec.items() if k not in order}


def cmd_route(args) -> int:
    from .routing.state import build_routing_state

    cfg = _config(args)
    g = load_graph(args.graph)
    if args.query:
        queries = [parse_query(args.query)]
    elif args.batch:
        queries = random_queries(g, cfg.f, args.batch, cfg.seed)
    else:
        raise BadConfig("give --query or --batch")
    state = build_routing_state(g, cfg.f, cfg.k, cfg.seed)
    records = []
    for s, t, F in queries:
        if not (1 <= s <= g.n and 1 <= t <= g.n):
            raise BadConfig(f"vertex outside 1..{g.n}")
        records.append(run_route(state, s, t, [edge_index(g, e) for e in F], args.known))
    emit(records, cfg.fmt)
    if len(records) > 1:
        st = sorted(r["stretch"] for r in records if r["stretch"] is not None)
        hist: dict[str, int] = {}
        for x in st:
            b = f"<{2 ** math.ceil(math.log2(max(x, 1)))}" if x > 1 else "1"
            hist[b] = hist.get(b, 0) + 1
        emit([{
            "queries": len(records),
            "delivered": sum(r["delivered"] for r in records),
            "max_stretch": st[-1] if st else None,
            "mean_stretch": sum(st) / len(st) if st else None,
            "histogram": hist,
        }], cfg.fmt)
    if any(not r["delivered"] for r in records):
        return EXIT_UNDELIVERED
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--f", type=int, default=2, help="fault budget")
    common.add_argument("--k", type=int, default=2, help="stretch parameter of the tree covers")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "table"), default="json")

    p = _Parser(prog="ftlabels", description="Fault-tolerant connectivity, distance labels and routing.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    gen = sub.add_parser("generate", help="write a fixture graph")
    gen.add_argument("--fixture", required=True, help='JSON spec, e.g. \'{"kind": "grid", "rows": 4, "cols": 5}\', or a file')
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_generate)

    lab = sub.add_parser("label", parents=[common], help="label a graph and report sizes")
    lab.add_argument("--scheme", choices=SCHEMES, default="cycle")
    lab.add_argument("--graph", required=True)
    lab.add_argument("--labels", required=True, help="output label file")
    lab.add_argument("--b", type=int, help="cycle label bits (default f + 40)")
    lab.add_argument("--L", type=int, help="sketch units")
    lab.add_argument("--lam", type=int, help="UID width in bits")
    lab.set_defaults(func=cmd_label)

    q = sub.add_parser("query", parents=[common], help="answer queries from a label file")
    q.add_argument("--scheme", choices=SCHEMES)
    q.add_argument("--labels", required=True)
    q.add_argument("--graph", help="graph for the oracle comparison")
    q.add_argument("--query", help='"s t e1 e2 ..." with edges as index or u-v')
    q.add_argument("--batch", type=int, help="random queries (needs --graph)")
    q.set_defaults(func=cmd_query)

    r = sub.add_parser("route", parents=[common], help="simulate routing around failed links")
    r.add_argument("--graph", required=True)
    r.add_argument("--query", help='"s t e1 e2 ..."; the edges fail')
    r.add_argument("--batch", type=int, help="random queries")
    mode = r.add_mutually_exclusive_group()
    mode.add_argument("--known", dest="known", action="store_true", default=False,
                      help="faults are known to the source")
    mode.add_argument("--unknown", dest="known", action="store_false", help="faults are discovered en route (default)")
    r.set_defaults(func=cmd_route)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (BadConfig, MissingLabel, TooManyFaults, GraphError) as exc:
        print(f"ftlabels: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FTLabelError as exc:
        print(f"ftlabels: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
