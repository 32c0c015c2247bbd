"""Compile a concrete query instance into graph-query-language text.

The emitted dialect is a small, portable Cypher subset with a fixed shape:
a single MATCH line (edges by pattern id, then isolated nodes), a WHERE line
carrying every predicate plus explicit node-distinctness and parallel-edge
distinctness terms, RETURN DISTINCT over the node variables, and an optional
LIMIT. Output is byte-deterministic for a given instance.

Every instance is already concrete, so fixed patterns suffice; the lattice,
not the query text, carries the variability. Other dialects would implement
this same translate(pattern, limit) -> TranslatedQuery signature; only this
one is built.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Op
from .pattern import PatternGraph


class NotConcreteError(ValueError):
    pass


@dataclass(frozen=True)
class TranslatedQuery:
    text: str
    var_map: dict[str, str]


_OP_TEXT = {Op.EQ: "=", Op.NE: "<>", Op.LT: "<", Op.LE: "<=", Op.GT: ">", Op.GE: ">="}


def _literal(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    return repr(value)  # shortest round-trip decimal for int/float


def translate(pattern: PatternGraph, limit: int | None = None) -> TranslatedQuery:
    """Render one instance. Raises NotConcreteError on path-abstraction
    markers: the lattice, not the query text, carries variability."""
    if pattern.has_markers():
        raise NotConcreteError("instance still contains path abstractions")
    if not pattern.pnodes:
        raise NotConcreteError("empty instance has no query text")

    node_ids = sorted(n.pid for n in pattern.pnodes)
    edge_ids = sorted(e.pid for e in pattern.pedges)
    var_map: dict[str, str] = {}
    for k, pid in enumerate(node_ids):
        var_map[pid] = f"n{k}"
    for k, pid in enumerate(edge_ids):
        var_map[pid] = f"e{k}"

    edges = {e.pid: e for e in pattern.pedges}
    connected: set[str] = set()
    match_terms: list[str] = []
    for pid in edge_ids:
        e = edges[pid]
        connected.update((e.source, e.target))
        link = "->" if e.directed else "-"
        match_terms.append(f"({var_map[e.source]})-[{var_map[e.pid]}]{link}({var_map[e.target]})")
    for pid in node_ids:
        if pid not in connected:
            match_terms.append(f"({var_map[pid]})")

    where_terms: list[str] = []
    preds = []
    for n in pattern.pnodes:
        for p in n.predicates:
            preds.append((n.pid, p))
    for e in pattern.pedges:
        for p in e.predicates:
            preds.append((e.pid, p))
    preds.sort(key=lambda ip: (ip[0], ip[1].attr, _OP_TEXT[ip[1].op], _literal(ip[1].literal)))
    for pid, p in preds:
        where_terms.append(f"{var_map[pid]}.{p.attr} {_OP_TEXT[p.op]} {_literal(p.literal)}")

    for i in range(len(node_ids)):
        for j in range(i + 1, len(node_ids)):
            where_terms.append(f"{var_map[node_ids[i]]} <> {var_map[node_ids[j]]}")

    by_pair: dict[tuple[str, str], list[str]] = {}
    for pid in edge_ids:
        e = edges[pid]
        key = (e.source, e.target) if e.source <= e.target else (e.target, e.source)
        by_pair.setdefault(key, []).append(pid)
    for key in sorted(by_pair):
        group = by_pair[key]
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                where_terms.append(f"{var_map[group[i]]} <> {var_map[group[j]]}")

    lines = ["MATCH " + ", ".join(match_terms)]
    if where_terms:
        lines.append("WHERE " + " AND ".join(where_terms))
    lines.append("RETURN DISTINCT " + ", ".join(var_map[pid] for pid in node_ids))
    if limit is not None:
        lines.append(f"LIMIT {limit}")
    return TranslatedQuery("\n".join(lines), var_map)
