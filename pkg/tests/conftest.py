import itertools
import json
from pathlib import Path

import pytest

from gqlattice.graph import GraphEdge, GraphNode, PropertyGraph
from gqlattice.pattern import Origin, PatternEdge, PatternGraph, PatternNode

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "gqlattice" / "fixtures"


def pnode(pid, preds=()):
    return PatternNode(pid, tuple(preds), Origin(pid, "0", "0"))


def pedge(pid, src, tgt, directed=False, preds=(), marker=None):
    return PatternEdge(pid, src, tgt, directed, tuple(preds), Origin(pid, "0", "0"), marker)


def simple_graph(directed, nodes, edges):
    """nodes: list of (id, attrs); edges: list of (id, src, tgt[, attrs])."""
    gnodes = [GraphNode(nid, dict(attrs)) for nid, attrs in nodes]
    gedges = []
    for spec in edges:
        eid, src, tgt = spec[:3]
        attrs = dict(spec[3]) if len(spec) > 3 else {}
        gedges.append(GraphEdge(eid, src, tgt, None, attrs))
    return PropertyGraph(directed, gnodes, gedges)


@pytest.fixture(scope="session")
def lmcn():
    from gqlattice.graph import load_graph

    with open(FIXTURES / "lmcn-case2-unconstrained" / "graph.json", encoding="utf-8") as f:
        return load_graph(json.load(f))


def brute_force_match(pattern: PatternGraph, g: PropertyGraph) -> set:
    """Independent oracle: enumerate every injective node mapping, check all
    edges/predicates, and expand injective edge assignments. Returns the set
    of (sorted node map, sorted edge map) keys."""
    out = set()
    pids = [n.pid for n in pattern.pnodes]
    if not pids:
        return {((), ())}
    for images in itertools.permutations(g.node_ids, len(pids)):
        nm = dict(zip(pids, images))
        if any(not all(p.matches(g.nodes[nm[n.pid]].attrs) for p in n.predicates)
               for n in pattern.pnodes):
            continue
        pools = []
        feasible = True
        for e in sorted(pattern.pedges, key=lambda e: e.pid):
            a, b = nm[e.source], nm[e.target]
            ok = []
            for eid in g.edge_ids:
                de = g.edges[eid]
                if g.directed:
                    if (de.source, de.target) != (a, b):
                        continue
                else:
                    want = {a, b} if a != b else {a}
                    if {de.source, de.target} != want:
                        continue
                if all(p.matches(de.attrs) for p in e.predicates):
                    ok.append(eid)
            if not ok:
                feasible = False
                break
            pools.append((e.pid, ok))
        if not feasible:
            continue

        def assign(i, used, em):
            if i == len(pools):
                out.add((tuple(sorted(nm.items())), tuple(sorted(em.items()))))
                return
            pid, pool = pools[i]
            for eid in pool:
                if eid not in used:
                    em[pid] = eid
                    assign(i + 1, used | {eid}, em)
                    del em[pid]

        assign(0, set(), {})
    return out
