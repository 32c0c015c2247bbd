"""Concrete pattern graphs: the things the matcher executes.

Every pattern element carries an origin tracing it back to the declared
entity (and rule-application copy) that created it. A pattern edge may be a
path-abstraction marker: a placeholder standing for a whole path motif that
has not been expanded yet. Markers appear only in backbone / preview /
fully-specified stages and are substituted before matching.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import Predicate


@dataclass(frozen=True)
class Origin:
    entity_id: str
    copy: str  # dotted copy tag: "0" originals, "0.2" second copy made by a later rule, ...
    local: str  # role within the entity: node index, edge index, "head", "link1", ...


@dataclass(frozen=True)
class PathMarker:
    """Payload of a path-abstraction edge: enough to substitute the minimal
    concrete path at execution time."""

    min_nodes: int


@dataclass(frozen=True)
class PatternNode:
    pid: str
    predicates: tuple[Predicate, ...]
    origin: Origin


@dataclass(frozen=True)
class PatternEdge:
    pid: str
    source: str
    target: str
    directed: bool
    predicates: tuple[Predicate, ...]
    origin: Origin
    marker: PathMarker | None = None


@dataclass
class PatternGraph:
    pnodes: list[PatternNode] = field(default_factory=list)
    pedges: list[PatternEdge] = field(default_factory=list)

    def node_ids(self) -> list[str]:
        return [n.pid for n in self.pnodes]

    def node(self, pid: str) -> PatternNode:
        for n in self.pnodes:
            if n.pid == pid:
                return n
        raise KeyError(pid)

    def has_markers(self) -> bool:
        return any(e.marker is not None for e in self.pedges)

    def degree(self, pid: str) -> tuple[int, int, int]:
        """(in, out, total) over pattern edges; undirected edges count toward
        all three on both endpoints."""
        ins = outs = total = 0
        for e in self.pedges:
            if e.directed:
                if e.source == pid:
                    outs += 1
                    total += 1
                if e.target == pid:
                    ins += 1
                    total += 1
            else:
                hits = (e.source == pid) + (e.target == pid)
                ins += hits
                outs += hits
                total += hits
        return (ins, outs, total)

    def structure_summary(self) -> dict:
        return {"nodes": len(self.pnodes), "edges": len(self.pedges)}


def pattern_to_json(p: PatternGraph) -> dict:
    def pred(pr: Predicate) -> dict:
        return {"attr": pr.attr, "op": pr.op.value, "literal": pr.literal}

    return {
        "nodes": [
            {
                "pid": n.pid,
                "predicates": [pred(pr) for pr in n.predicates],
                "origin": {"entity": n.origin.entity_id, "copy": n.origin.copy, "local": n.origin.local},
            }
            for n in p.pnodes
        ],
        "edges": [
            {
                "pid": e.pid,
                "source": e.source,
                "target": e.target,
                "directed": e.directed,
                "predicates": [pred(pr) for pr in e.predicates],
                "origin": {"entity": e.origin.entity_id, "copy": e.origin.copy, "local": e.origin.local},
                **({"pathMarker": {"minNodes": e.marker.min_nodes}} if e.marker else {}),
            }
            for e in p.pedges
        ],
    }


def pattern_from_json(doc: dict) -> PatternGraph:
    from .model import Op

    def pred(d: dict) -> Predicate:
        return Predicate(d["attr"], Op(d["op"]), d["literal"])

    p = PatternGraph()
    for nd in doc["nodes"]:
        o = nd["origin"]
        p.pnodes.append(
            PatternNode(nd["pid"], tuple(pred(x) for x in nd["predicates"]),
                        Origin(o["entity"], o["copy"], o["local"]))
        )
    for ed in doc["edges"]:
        o = ed["origin"]
        marker = None
        if "pathMarker" in ed:
            marker = PathMarker(ed["pathMarker"]["minNodes"])
        p.pedges.append(
            PatternEdge(ed["pid"], ed["source"], ed["target"], ed["directed"],
                        tuple(pred(x) for x in ed["predicates"]),
                        Origin(o["entity"], o["copy"], o["local"]), marker)
        )
    return p
