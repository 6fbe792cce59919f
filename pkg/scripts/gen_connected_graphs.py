"""Regenerate tests/data/connected_graphs.g6: every connected graph on 2..8
vertices up to isomorphism, one graph6 string per line.

Built by vertex augmentation (every connected graph has a non-cut vertex) and
deduplicated by nauty canonical certificates.  Needs pynauty and networkx,
which are dev-only dependencies.
"""

import sys

import networkx as nx
import pynauty

EXPECTED = {2: 1, 3: 2, 4: 6, 5: 21, 6: 112, 7: 853, 8: 11117}


def certificate(g: nx.Graph) -> bytes:
    n = g.number_of_nodes()
    adj = {v: [u for u in g[v]] for v in range(n)}
    return pynauty.certificate(pynauty.Graph(n, adjacency_dict=adj))


def main(out_path: str) -> None:
    level = [nx.path_graph(2)]
    by_n = {2: level}
    for n in range(3, 9):
        seen = {}
        for h in level:
            for mask in range(1, 1 << (n - 1)):
                g = h.copy()
                g.add_node(n - 1)
                g.add_edges_from((n - 1, u) for u in range(n - 1) if mask >> u & 1)
                cert = certificate(g)
                if cert not in seen:
                    seen[cert] = g
        level = list(seen.values())
        by_n[n] = level
    with open(out_path, "w") as fh:
        for n in sorted(by_n):
            assert len(by_n[n]) == EXPECTED[n], (n, len(by_n[n]))
            for g in by_n[n]:
                fh.write(nx.to_graph6_bytes(g, header=False).decode().strip() + "\n")
    print({n: len(v) for n, v in by_n.items()})


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data/connected_graphs.g6")
