"""In-memory property graph: directed or undirected multigraph with typed attributes.

Graphs are immutable after construction and safe to share across concurrent
readers. Attribute values are strings, finite numbers (64-bit float range,
integers exact up to 2**53), or booleans.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

AttrValue = str | int | float | bool

MAX_EXACT_INT = 2**53

_ALLOWED_TOP_KEYS = {"directed", "nodes", "edges"}


class GraphFormatError(ValueError):
    """Raised when a graph document violates the file format or graph invariants."""

    def __init__(self, message: str, *, offender: str | None = None):
        self.offender = offender
        if offender is not None:
            message = f"{message} (at {offender!r})"
        super().__init__(message)


def check_attr_value(value: object, *, offender: str) -> AttrValue:
    """Validate a single attribute value; returns it unchanged."""
    if isinstance(value, bool) or isinstance(value, str):
        return value
    if isinstance(value, int):
        if abs(value) > MAX_EXACT_INT:
            raise GraphFormatError(
                f"integer attribute {value} exceeds 2**53 and is not exactly representable",
                offender=offender,
            )
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise GraphFormatError(f"non-finite number {value!r}", offender=offender)
        return value
    raise GraphFormatError(
        f"unsupported attribute value type {type(value).__name__}", offender=offender
    )


def _check_attrs(attrs: object, *, offender: str) -> dict[str, AttrValue]:
    if attrs is None:
        return {}
    if not isinstance(attrs, dict):
        raise GraphFormatError("attrs must be an object", offender=offender)
    out: dict[str, AttrValue] = {}
    for k, v in attrs.items():
        if not isinstance(k, str):
            raise GraphFormatError(f"attribute name {k!r} is not a string", offender=offender)
        out[k] = check_attr_value(v, offender=f"{offender}.{k}")
    return out


@dataclass(frozen=True)
class GraphNode:
    id: str
    attrs: dict[str, AttrValue] = field(default_factory=dict)


@dataclass(frozen=True)
class GraphEdge:
    id: str
    source: str
    target: str
    label: str | None = None
    attrs: dict[str, AttrValue] = field(default_factory=dict)


class PropertyGraph:
    """Validated multigraph with id-indexed nodes/edges and adjacency indexes.

    Parallel edges between the same node pair are permitted. For undirected
    graphs the stored (source, target) orientation is preserved but treated
    as an unordered pair by every consumer.
    """

    def __init__(self, directed: bool, nodes: list[GraphNode], edges: list[GraphEdge]):
        self.directed = bool(directed)
        self.nodes: dict[str, GraphNode] = {}
        self.edges: dict[str, GraphEdge] = {}
        self.node_ids: list[str] = []
        self.edge_ids: list[str] = []
        for n in nodes:
            if n.id in self.nodes:
                raise GraphFormatError("duplicate node id", offender=n.id)
            self.nodes[n.id] = n
            self.node_ids.append(n.id)
        for e in edges:
            if e.id in self.edges:
                raise GraphFormatError("duplicate edge id", offender=e.id)
            for endpoint in (e.source, e.target):
                if endpoint not in self.nodes:
                    raise GraphFormatError(
                        f"edge {e.id!r} references missing node", offender=endpoint
                    )
            self.edges[e.id] = e
            self.edge_ids.append(e.id)

        # Adjacency: per node, incident edge ids in insertion order.
        self._out: dict[str, list[str]] = {nid: [] for nid in self.node_ids}
        self._in: dict[str, list[str]] = {nid: [] for nid in self.node_ids}
        # Edge ids keyed by endpoint pair: ordered (u, v) for directed graphs,
        # unordered for undirected ones.
        self._between: dict[tuple[str, str], list[str]] = {}
        for eid in self.edge_ids:
            e = self.edges[eid]
            self._out[e.source].append(eid)
            self._in[e.target].append(eid)
            self._between.setdefault(self._pair_key(e.source, e.target), []).append(eid)

    def _pair_key(self, u: str, v: str) -> tuple[str, str]:
        if self.directed:
            return (u, v)
        return (u, v) if u <= v else (v, u)

    def edges_between(self, u: str, v: str) -> list[str]:
        """Edge ids between u and v; direction u->v for directed graphs."""
        return self._between.get(self._pair_key(u, v), [])

    def out_edges(self, nid: str) -> list[str]:
        return self._out[nid]

    def in_edges(self, nid: str) -> list[str]:
        return self._in[nid]

    def incident_edges(self, nid: str) -> list[str]:
        """All incident edge ids (out then in; self-loops not repeated)."""
        out = self._out[nid]
        return out + [eid for eid in self._in[nid] if self.edges[eid].source != nid]

    def degree(self, nid: str) -> tuple[int, int, int]:
        """(in-degree, out-degree, total). Undirected: in = out = total."""
        if self.directed:
            i, o = len(self._in[nid]), len(self._out[nid])
            return (i, o, i + o)
        total = len(self._out[nid]) + len(self._in[nid])  # self-loops count twice
        return (total, total, total)

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"<PropertyGraph {kind} |V|={len(self.nodes)} |E|={len(self.edges)}>"


def degree_index(g: PropertyGraph) -> dict[str, tuple[int, int, int]]:
    """Per-node (in, out, total) degree map."""
    return {nid: g.degree(nid) for nid in g.node_ids}


def load_graph(document: object) -> PropertyGraph:
    """Build a PropertyGraph from a parsed graph document (see file format in README)."""
    if not isinstance(document, dict):
        raise GraphFormatError("graph document must be a JSON object")
    unknown = set(document) - _ALLOWED_TOP_KEYS
    if unknown:
        raise GraphFormatError(f"unknown top-level keys {sorted(unknown)}")
    directed = document.get("directed")
    if not isinstance(directed, bool):
        raise GraphFormatError("'directed' must be true or false")
    raw_nodes = document.get("nodes")
    raw_edges = document.get("edges")
    if not isinstance(raw_nodes, list) or not isinstance(raw_edges, list):
        raise GraphFormatError("'nodes' and 'edges' must be arrays")

    nodes: list[GraphNode] = []
    for i, rn in enumerate(raw_nodes):
        if not isinstance(rn, dict) or not isinstance(rn.get("id"), str):
            raise GraphFormatError(f"node #{i} must be an object with a string 'id'")
        extra = set(rn) - {"id", "attrs"}
        if extra:
            raise GraphFormatError(f"unknown node keys {sorted(extra)}", offender=rn["id"])
        nodes.append(GraphNode(rn["id"], _check_attrs(rn.get("attrs"), offender=rn["id"])))

    edges: list[GraphEdge] = []
    for i, re_ in enumerate(raw_edges):
        if not isinstance(re_, dict) or not isinstance(re_.get("id"), str):
            raise GraphFormatError(f"edge #{i} must be an object with a string 'id'")
        extra = set(re_) - {"id", "source", "target", "label", "attrs"}
        if extra:
            raise GraphFormatError(f"unknown edge keys {sorted(extra)}", offender=re_["id"])
        src, tgt = re_.get("source"), re_.get("target")
        if not isinstance(src, str) or not isinstance(tgt, str):
            raise GraphFormatError("edge source/target must be strings", offender=re_["id"])
        label = re_.get("label")
        if label is not None and not isinstance(label, str):
            raise GraphFormatError("edge label must be a string", offender=re_["id"])
        edges.append(
            GraphEdge(re_["id"], src, tgt, label, _check_attrs(re_.get("attrs"), offender=re_["id"]))
        )
    return PropertyGraph(directed, nodes, edges)


def serialize_graph(g: PropertyGraph) -> dict:
    """Inverse of load_graph; round-trips exactly."""
    nodes = [{"id": n.id, "attrs": dict(n.attrs)} for n in (g.nodes[i] for i in g.node_ids)]
    edges = []
    for eid in g.edge_ids:
        e = g.edges[eid]
        d: dict = {"id": e.id, "source": e.source, "target": e.target}
        if e.label is not None:
            d["label"] = e.label
        d["attrs"] = dict(e.attrs)
        edges.append(d)
    return {"directed": g.directed, "nodes": nodes, "edges": edges}


def load_graph_file(path: str) -> PropertyGraph:
    with open(path, encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"malformed JSON: {exc}") from exc
    return load_graph(doc)
