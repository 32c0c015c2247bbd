"""Typed model of graph query representations: entities, predicates, rules.

A query representation is a set of declared entities (nodes, edges, motifs,
groups) plus parameterized rules. Rules with parameter ranges make the
representation underspecified: it then denotes a family of concrete query
instances rather than a single pattern.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

from .graph import AttrValue


class Op(enum.Enum):
    EQ = "=="
    NE = "!="
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="


ORDER_OPS = {Op.LT, Op.LE, Op.GT, Op.GE}


@dataclass(frozen=True)
class Predicate:
    """A single attribute constraint, e.g. value > 100 or name == "Valjean"."""

    attr: str
    op: Op
    literal: AttrValue

    def matches(self, attrs: dict[str, AttrValue]) -> bool:
        """Evaluate against an attribute map. Type mismatches are never errors:
        a predicate over an absent or differently-typed attribute is simply
        not satisfied."""
        if self.attr not in attrs:
            return False
        actual = attrs[self.attr]
        lit = self.literal
        if isinstance(lit, bool) or isinstance(actual, bool):
            # bool is an int subtype in Python; keep booleans a separate type class
            if not (isinstance(lit, bool) and isinstance(actual, bool)):
                return False
        elif isinstance(lit, (int, float)) != isinstance(actual, (int, float)):
            return False
        elif isinstance(lit, str) != isinstance(actual, str):
            return False
        if self.op is Op.EQ:
            return actual == lit
        if self.op is Op.NE:
            return actual != lit
        if isinstance(lit, bool) or isinstance(actual, bool) or isinstance(lit, str):
            return False  # ordering comparisons are numeric-only
        if self.op is Op.LT:
            return actual < lit
        if self.op is Op.LE:
            return actual <= lit
        if self.op is Op.GT:
            return actual > lit
        return actual >= lit


@dataclass(frozen=True)
class IntRange:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty range {self.lo}..{self.hi}")

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1

    def values(self) -> range:
        return range(self.lo, self.hi + 1)

    def is_fixed(self) -> bool:
        return self.lo == self.hi


class MotifKind(enum.Enum):
    PATH = "path"
    LOOP = "loop"
    TREE = "tree"
    CLIQUE = "clique"


MOTIF_MIN_NODES = {
    MotifKind.PATH: 2,
    MotifKind.LOOP: 3,
    MotifKind.TREE: 2,
    MotifKind.CLIQUE: 2,
}


# --- entities ---------------------------------------------------------------

@dataclass(frozen=True)
class EntityRef:
    """Reference to an entity used as an edge endpoint. Path motifs expose two
    attachable nodes, selected by port 'head' or 'tail'; every other entity is
    referenced bare."""

    entity_id: str
    port: str | None = None  # None | "head" | "tail"


@dataclass(frozen=True)
class NodeEntity:
    id: str


@dataclass(frozen=True)
class EdgeEntity:
    id: str
    source: EntityRef
    target: EntityRef
    directed: bool


@dataclass(frozen=True)
class MotifEntity:
    id: str
    kind: MotifKind


@dataclass(frozen=True)
class CustomEntity:
    id: str
    members: tuple[str, ...]


Entity = NodeEntity | EdgeEntity | MotifEntity | CustomEntity


# --- rule bodies ------------------------------------------------------------

@dataclass(frozen=True)
class NodeAttrRule:
    predicate: Predicate


@dataclass(frozen=True)
class EdgeAttrRule:
    predicate: Predicate


@dataclass(frozen=True)
class MotifConfigRule:
    node_range: IntRange
    width_range: IntRange | None = None
    depth_range: IntRange | None = None


@dataclass(frozen=True)
class RepeatingRule:
    count_range: IntRange


class ChainMode(enum.Enum):
    LINKED = "linked"
    SHARED = "shared"


@dataclass(frozen=True)
class ChainingRule:
    start_node: str
    end_node: str
    iter_range: IntRange
    mode: ChainMode


RuleBody = NodeAttrRule | EdgeAttrRule | MotifConfigRule | RepeatingRule | ChainingRule

STRUCTURAL_BODIES = (MotifConfigRule, RepeatingRule, ChainingRule)


@dataclass(frozen=True)
class Rule:
    id: str
    target: str
    body: RuleBody

    def is_structural(self) -> bool:
        return isinstance(self.body, STRUCTURAL_BODIES)


@dataclass
class QueryRepresentation:
    name: str
    entities: list[Entity] = field(default_factory=list)
    rules: list[Rule] = field(default_factory=list)

    def entity(self, entity_id: str) -> Entity | None:
        for e in self.entities:
            if e.id == entity_id:
                return e
        return None

    def entity_map(self) -> dict[str, Entity]:
        return {e.id: e for e in self.entities}

    def rule(self, rule_id: str) -> Rule | None:
        for r in self.rules:
            if r.id == rule_id:
                return r
        return None

    def inferred_directed(self) -> bool:
        """Query mode: directed iff any declared edge is directed. Motif
        expansion follows this mode; the graph's own directedness is checked
        at execution setup."""
        return any(isinstance(e, EdgeEntity) and e.directed for e in self.entities)


# --- diagnostics and validation ----------------------------------------------

@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    subject: str | None = None  # entity or rule id
    span: object | None = None  # SourceSpan when produced by the DSL parser

    def __str__(self) -> str:
        where = f" [{self.subject}]" if self.subject else ""
        return f"{self.severity}{where}: {self.message}"


def _err(message: str, subject: str | None = None) -> Diagnostic:
    return Diagnostic("error", message, subject)


def _warn(message: str, subject: str | None = None) -> Diagnostic:
    return Diagnostic("warning", message, subject)


def validate(qr: QueryRepresentation) -> list[Diagnostic]:
    """Check every model invariant; returns an empty list iff the
    representation is well-formed. Warnings do not make it invalid."""
    diags: list[Diagnostic] = []
    ents: dict[str, Entity] = {}
    for e in qr.entities:
        if e.id in ents:
            diags.append(_err(f"duplicate entity id {e.id!r}", e.id))
        ents[e.id] = e

    def check_endpoint(edge: EdgeEntity, ref: EntityRef, which: str):
        tgt = ents.get(ref.entity_id)
        if tgt is None:
            diags.append(_err(f"edge {which} references undeclared entity {ref.entity_id!r}", edge.id))
            return
        if isinstance(tgt, (EdgeEntity, CustomEntity)):
            diags.append(_err(f"edge {which} may not reference a {type(tgt).__name__}", edge.id))
            return
        if isinstance(tgt, MotifEntity) and tgt.kind is MotifKind.PATH:
            if ref.port not in ("head", "tail"):
                diags.append(_err(f"edge {which} attaching to path {tgt.id!r} must name head or tail", edge.id))
        elif ref.port is not None:
            diags.append(_err(f"edge {which}: port {ref.port!r} is only valid on path motifs", edge.id))

    for e in qr.entities:
        if isinstance(e, EdgeEntity):
            check_endpoint(e, e.source, "source")
            check_endpoint(e, e.target, "target")
        elif isinstance(e, CustomEntity):
            seen: set[str] = set()
            for m in e.members:
                if m in seen:
                    diags.append(_err(f"duplicate member {m!r}", e.id))
                seen.add(m)
                tgt = ents.get(m)
                if tgt is None:
                    diags.append(_err(f"member {m!r} is not declared", e.id))
                elif isinstance(tgt, CustomEntity):
                    diags.append(_err("customized entities cannot be nested", e.id))

    rule_ids: set[str] = set()
    structural_by_target: dict[str, list[Rule]] = {}
    config_by_motif: dict[str, list[Rule]] = {}
    for r in qr.rules:
        if r.id in rule_ids:
            diags.append(_err(f"duplicate rule id {r.id!r}", r.id))
        rule_ids.add(r.id)
        target = ents.get(r.target)
        if target is None:
            diags.append(_err(f"rule targets undeclared entity {r.target!r}", r.id))
            continue
        body = r.body
        if isinstance(body, (NodeAttrRule, EdgeAttrRule)):
            pred = body.predicate
            if pred.op in ORDER_OPS and (isinstance(pred.literal, bool) or not isinstance(pred.literal, (int, float))):
                diags.append(_err(f"operator {pred.op.value} requires a numeric literal", r.id))
            if isinstance(body, NodeAttrRule) and isinstance(target, EdgeEntity):
                diags.append(_err("node attribute rule cannot target an edge", r.id))
            if isinstance(body, EdgeAttrRule) and isinstance(target, NodeEntity):
                diags.append(_err("edge attribute rule cannot target a node", r.id))
        elif isinstance(body, MotifConfigRule):
            if not isinstance(target, MotifEntity):
                diags.append(_err("motif configuration must target a motif", r.id))
            else:
                config_by_motif.setdefault(target.id, []).append(r)
                minimum = MOTIF_MIN_NODES[target.kind]
                if body.node_range.lo < minimum:
                    diags.append(_err(
                        f"{target.kind.value} requires at least {minimum} nodes, got range "
                        f"{body.node_range.lo}..{body.node_range.hi}", r.id))
                if target.kind is not MotifKind.TREE and (body.width_range or body.depth_range):
                    diags.append(_err("width/depth ranges are only valid for tree motifs", r.id))
                for rng, label in ((body.width_range, "width"), (body.depth_range, "depth")):
                    if rng is not None and rng.lo < 1:
                        diags.append(_err(f"{label} must be at least 1", r.id))
        elif isinstance(body, RepeatingRule):
            structural_by_target.setdefault(r.target, []).append(r)
            if body.count_range.lo < 0:
                diags.append(_err("repeat count cannot be negative", r.id))
        elif isinstance(body, ChainingRule):
            structural_by_target.setdefault(r.target, []).append(r)
            if body.iter_range.lo < 0:
                diags.append(_err("chaining iterations cannot be negative", r.id))
            if isinstance(target, NodeEntity):
                if body.start_node != target.id or body.end_node != target.id:
                    diags.append(_err("chaining a node requires start = end = the node itself", r.id))
                elif body.mode is ChainMode.SHARED:
                    diags.append(_warn(
                        "shared-node chaining of a single node merges every copy away (no growth)", r.id))
            elif isinstance(target, CustomEntity):
                for ref, label in ((body.start_node, "start"), (body.end_node, "end")):
                    node = ents.get(ref)
                    if ref not in target.members or not isinstance(node, NodeEntity):
                        diags.append(_err(f"{label} node {ref!r} must be a node member of {target.id!r}", r.id))
                if (body.mode is ChainMode.SHARED and body.start_node == body.end_node
                        and len(target.members) > 1):
                    diags.append(_err(
                        "shared-node chaining with start = end would collapse each copy onto itself", r.id))
            else:
                diags.append(_err("chaining may only target a node or a customized entity", r.id))

    # Repeating/chaining are mutually exclusive per target. Motif configurations
    # are intrinsic to the motif (one mandatory per motif) and do not count
    # against that budget: a motif may be both configured and repeated.
    for target_id, rules in structural_by_target.items():
        if len(rules) > 1:
            ids = ", ".join(r.id for r in rules)
            diags.append(_err(f"entity {target_id!r} has multiple repeat/chain rules ({ids})", rules[1].id))
    for e in qr.entities:
        if isinstance(e, MotifEntity):
            configs = config_by_motif.get(e.id, [])
            if not configs:
                diags.append(_err(f"motif {e.id!r} has no configuration rule", e.id))
            elif len(configs) > 1:
                diags.append(_err(f"motif {e.id!r} has multiple configuration rules", configs[1].id))
    return diags


def is_valid(qr: QueryRepresentation) -> bool:
    return not any(d.severity == "error" for d in validate(qr))


def classify_rules(qr: QueryRepresentation) -> tuple[list[str], list[str]]:
    """Partition structural rule ids into (fully specified, underspecified),
    each in rule declaration order. A structural rule is fully specified iff
    every one of its ranges is a single value. Attribute rules appear in
    neither list: they attach directly to instances and cause no variation."""
    fully, under = [], []
    for r in qr.rules:
        if not r.is_structural():
            continue
        ranges = _rule_ranges(r)
        (fully if all(rng.is_fixed() for rng in ranges) else under).append(r.id)
    return fully, under


def _rule_ranges(rule: Rule) -> list[IntRange]:
    body = rule.body
    if isinstance(body, MotifConfigRule):
        return [rng for rng in (body.node_range, body.width_range, body.depth_range) if rng]
    if isinstance(body, RepeatingRule):
        return [body.count_range]
    if isinstance(body, ChainingRule):
        return [body.iter_range]
    raise ValueError(f"rule {rule.id} is not structural")


# --- canonical JSON form ------------------------------------------------------

def _range_json(rng: IntRange | None):
    return None if rng is None else [rng.lo, rng.hi]


def _pred_json(p: Predicate) -> dict:
    return {"attr": p.attr, "op": p.op.value, "literal": p.literal}


def qr_to_json(qr: QueryRepresentation) -> dict:
    entities = []
    for e in qr.entities:
        if isinstance(e, NodeEntity):
            entities.append({"kind": "node", "id": e.id})
        elif isinstance(e, EdgeEntity):
            entities.append({
                "kind": "edge", "id": e.id, "directed": e.directed,
                "source": {"entity": e.source.entity_id, "port": e.source.port},
                "target": {"entity": e.target.entity_id, "port": e.target.port},
            })
        elif isinstance(e, MotifEntity):
            entities.append({"kind": "motif", "id": e.id, "motif": e.kind.value})
        else:
            entities.append({"kind": "group", "id": e.id, "members": list(e.members)})
    rules = []
    for r in qr.rules:
        b = r.body
        if isinstance(b, NodeAttrRule):
            body = {"kind": "nodeAttr", "predicate": _pred_json(b.predicate)}
        elif isinstance(b, EdgeAttrRule):
            body = {"kind": "edgeAttr", "predicate": _pred_json(b.predicate)}
        elif isinstance(b, MotifConfigRule):
            body = {"kind": "motifConfig", "nodes": _range_json(b.node_range),
                    "width": _range_json(b.width_range), "depth": _range_json(b.depth_range)}
        elif isinstance(b, RepeatingRule):
            body = {"kind": "repeat", "count": _range_json(b.count_range)}
        else:
            body = {"kind": "chain", "start": b.start_node, "end": b.end_node,
                    "iterations": _range_json(b.iter_range), "mode": b.mode.value}
        rules.append({"id": r.id, "target": r.target, "body": body})
    return {"name": qr.name, "entities": entities, "rules": rules}


def qr_from_json(doc: dict) -> QueryRepresentation:
    def rng(v) -> IntRange | None:
        return None if v is None else IntRange(int(v[0]), int(v[1]))

    def ref(v) -> EntityRef:
        return EntityRef(v["entity"], v.get("port"))

    def pred(v) -> Predicate:
        return Predicate(v["attr"], Op(v["op"]), v["literal"])

    entities: list[Entity] = []
    for e in doc.get("entities", []):
        kind = e["kind"]
        if kind == "node":
            entities.append(NodeEntity(e["id"]))
        elif kind == "edge":
            entities.append(EdgeEntity(e["id"], ref(e["source"]), ref(e["target"]),
                                       bool(e["directed"])))
        elif kind == "motif":
            entities.append(MotifEntity(e["id"], MotifKind(e["motif"])))
        elif kind == "group":
            entities.append(CustomEntity(e["id"], tuple(e["members"])))
        else:
            raise ValueError(f"unknown entity kind {kind!r}")
    rules: list[Rule] = []
    for r in doc.get("rules", []):
        b = r["body"]
        kind = b["kind"]
        if kind == "nodeAttr":
            body: RuleBody = NodeAttrRule(pred(b["predicate"]))
        elif kind == "edgeAttr":
            body = EdgeAttrRule(pred(b["predicate"]))
        elif kind == "motifConfig":
            body = MotifConfigRule(rng(b["nodes"]), rng(b.get("width")), rng(b.get("depth")))
        elif kind == "repeat":
            body = RepeatingRule(rng(b["count"]))
        elif kind == "chain":
            body = ChainingRule(b["start"], b["end"], rng(b["iterations"]),
                                ChainMode(b["mode"]))
        else:
            raise ValueError(f"unknown rule kind {kind!r}")
        rules.append(Rule(r["id"], r["target"], body))
    return QueryRepresentation(str(doc.get("name", "unnamed")), entities, rules)


def assignments(rule: Rule) -> list[dict[str, int]]:
    """All parameter assignments of a structural rule: the Cartesian product of
    its ranges in lexicographic order (node count major, then width, then depth)."""
    body = rule.body
    if isinstance(body, MotifConfigRule):
        axes: list[tuple[str, IntRange]] = [("nodes", body.node_range)]
        if body.width_range is not None:
            axes.append(("width", body.width_range))
        if body.depth_range is not None:
            axes.append(("depth", body.depth_range))
        names = [n for n, _ in axes]
        out = []
        for combo in itertools.product(*(rng.values() for _, rng in axes)):
            out.append(dict(zip(names, combo)))
        return out
    if isinstance(body, RepeatingRule):
        return [{"count": k} for k in body.count_range.values()]
    if isinstance(body, ChainingRule):
        return [{"iterations": k} for k in body.iter_range.values()]
    raise ValueError(f"rule {rule.id} is not structural")
