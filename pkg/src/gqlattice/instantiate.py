"""Instantiation: from a query representation to the full lattice of concrete
query instances.

Construction is staged. The backbone shows every entity once with motifs
abstracted (non-path motifs as a single representative node, paths as a
head/tail pair joined by a path-abstraction marker). Each rule with a single
possible outcome gets a preview (backbone + that rule alone), and applying all
of them yields the fully-specified instance. Rules with several possible
outcomes then generate layered combination cells: layer k holds one cell per
k-subset of those rules, and a cell's instances enumerate the product of its
rules' choices while every other rule is held at its first choice.

Embedding witnesses (injective pattern-into-pattern homomorphisms) are
recorded between instances wherever construction plus verification yields
one; they are the sole basis for empty-result pruning downstream.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from .model import (
    ChainingRule,
    ChainMode,
    CustomEntity,
    EdgeEntity,
    EntityRef,
    MotifConfigRule,
    MotifEntity,
    MotifKind,
    NodeAttrRule,
    EdgeAttrRule,
    NodeEntity,
    Predicate,
    QueryRepresentation,
    RepeatingRule,
    Rule,
    assignments,
    validate,
)
from .motifs import MotifFragment, expand_motif
from .pattern import Origin, PathMarker, PatternEdge, PatternGraph, PatternNode, pattern_to_json


class InstantiationError(ValueError):
    pass


class InvalidRepresentationError(InstantiationError):
    def __init__(self, diagnostics):
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics))


class LatticeSizeError(InstantiationError):
    def __init__(self, message: str, *, cell: str | None = None, count: int | None = None):
        self.cell = cell
        self.count = count
        super().__init__(message)


@dataclass(frozen=True)
class LatticeCaps:
    max_instances: int = 2000
    max_pattern_nodes: int = 200


# --- stages -------------------------------------------------------------------

@dataclass(frozen=True)
class Backbone:
    pass


@dataclass(frozen=True)
class FsRulePreview:
    rule_id: str


@dataclass(frozen=True)
class FsFinal:
    pass


@dataclass(frozen=True)
class Combo:
    layer: int
    rule_set: tuple[str, ...]


Stage = Backbone | FsRulePreview | FsFinal | Combo

Choice = dict[str, int]  # parameter name -> value; trees add a "shape" index


@dataclass
class QueryInstance:
    id: str
    pattern: PatternGraph
    assignment: dict[str, Choice]
    stage: Stage


@dataclass
class ComboCell:
    id: str
    layer: int
    rule_set: tuple[str, ...]
    instances: list[QueryInstance]


@dataclass(frozen=True)
class Witness:
    nodes: tuple[tuple[str, str], ...]
    edges: tuple[tuple[str, str], ...]

    def node_map(self) -> dict[str, str]:
        return dict(self.nodes)

    def edge_map(self) -> dict[str, str]:
        return dict(self.edges)


@dataclass
class InstantiationLattice:
    qr: QueryRepresentation
    directed: bool
    backbone: QueryInstance
    fs_previews: list[QueryInstance]
    fs_final: QueryInstance
    layers: list[list[ComboCell]]  # layers[k-1] = cells of layer k
    flows: list[tuple[str, str]]  # (smaller cell id, superset cell id)
    embeddings: dict[tuple[str, str], Witness]  # (smaller instance id, larger instance id)
    underspecified: list[str] = field(default_factory=list)
    fully_specified: list[str] = field(default_factory=list)

    def all_instances(self) -> list[QueryInstance]:
        out = [self.backbone, *self.fs_previews, self.fs_final]
        for layer in self.layers:
            for cell in layer:
                out.extend(cell.instances)
        return out

    def instance(self, instance_id: str) -> QueryInstance | None:
        for inst in self.all_instances():
            if inst.id == instance_id:
                return inst
        return None

    def cell(self, cell_id: str) -> ComboCell | None:
        for layer in self.layers:
            for c in layer:
                if c.id == cell_id:
                    return c
        return None

    def final_cell(self) -> ComboCell | None:
        if not self.layers:
            return None
        return self.layers[-1][0]

    def resolve_step(self, ref: str) -> list[QueryInstance]:
        """Resolve a step reference to its instances.

        Accepted forms: "backbone", "fs:<rule-id>", "fs-final", "final"
        (the all-rules cell, or the fully-specified instance when nothing is
        underspecified), "layer:<k>", "cell:<r1+r2+...>", or an instance id.
        """
        if ref == "backbone":
            return [self.backbone]
        if ref == "fs-final":
            return [self.fs_final]
        if ref == "final":
            last = self.final_cell()
            return list(last.instances) if last else [self.fs_final]
        if ref.startswith("layer:"):
            try:
                k = int(ref.split(":", 1)[1])
            except ValueError:
                raise KeyError(ref) from None
            if not 1 <= k <= len(self.layers):
                raise KeyError(ref)
            return [inst for cell in self.layers[k - 1] for inst in cell.instances]
        if ref.startswith("fs:"):
            for p in self.fs_previews:
                if p.id == ref:
                    return [p]
            raise KeyError(ref)
        if ref.startswith("cell:"):
            c = self.cell(ref)
            if c is not None:
                return list(c.instances)
        inst = self.instance(ref)
        if inst is None:
            raise KeyError(ref)
        return [inst]

    def suggested_order(self) -> list[str]:
        """Step references in the natural progressive order."""
        refs = ["backbone"] + [p.id for p in self.fs_previews] + ["fs-final"]
        for layer in self.layers:
            refs.extend(cell.id for cell in layer)
        return refs


# --- choice enumeration -------------------------------------------------------

def rule_choices(qr: QueryRepresentation, rule: Rule, directed: bool) -> list[Choice]:
    """Concrete outcomes of one structural rule. For motif rules each range
    assignment expands per admitted shape (trees may admit several
    non-isomorphic shapes per assignment; other kinds exactly one)."""
    body = rule.body
    if isinstance(body, (RepeatingRule, ChainingRule)):
        return [dict(a) for a in assignments(rule)]
    if isinstance(body, MotifConfigRule):
        target = qr.entity(rule.target)
        assert isinstance(target, MotifEntity)
        out: list[Choice] = []
        for a in assignments(rule):
            for frag in expand_motif(target.kind, a, directed):
                choice = dict(a)
                if frag.shape_index is not None:
                    choice["shape"] = frag.shape_index
                out.append(choice)
        if not out and target.kind is MotifKind.TREE:
            # some assignments may admit no shape; only a fully empty list is fatal
            raise InstantiationError(
                f"tree configuration {rule.id} admits no shape under its width/depth bounds")
        return out
    raise ValueError(f"rule {rule.id} is not structural")


def _fragment_for_choice(kind: MotifKind, choice: Choice, directed: bool) -> MotifFragment:
    params = {k: v for k, v in choice.items() if k != "shape"}
    frags = expand_motif(kind, params, directed)
    if kind is MotifKind.TREE:
        for f in frags:
            if f.shape_index == choice["shape"]:
                return f
        raise InstantiationError(f"no tree shape {choice['shape']} for {params}")
    return frags[0]


# --- pattern materialization ----------------------------------------------------

def _pid(entity_id: str, copy: str, local: str) -> str:
    return f"{entity_id}#{copy}#{local}"


class _Builder:
    """Materializes one concrete (or partially abstract) pattern.

    motif_choice maps every motif id to a choice dict, or None to keep it
    abstract. struct_counts maps repeat/chain rule ids to their copy count;
    rules absent from it are not applied.
    """

    def __init__(self, qr: QueryRepresentation, directed: bool,
                 motif_choice: dict[str, Choice | None],
                 struct_counts: dict[str, int]):
        self.qr = qr
        self.directed = directed
        self.motif_choice = motif_choice
        self.struct_counts = struct_counts
        self.entities = qr.entity_map()
        self.nodes: dict[str, PatternNode] = {}
        self.edges: dict[str, PatternEdge] = {}
        # per motif: (head pid, tail pid) for paths / representative pid otherwise
        self._attach: dict[str, dict[str, str]] = {}

    # -- base construction

    def build(self) -> PatternGraph:
        for ent in self.qr.entities:
            if isinstance(ent, NodeEntity):
                self._add_node(_pid(ent.id, "0", "0"), (), Origin(ent.id, "0", "0"))
            elif isinstance(ent, MotifEntity):
                self._build_motif(ent)
            elif isinstance(ent, EdgeEntity):
                src = self._attach_point(ent.source)
                tgt = self._attach_point(ent.target)
                self._add_edge(_pid(ent.id, "0", "0"), src, tgt, ent.directed, (),
                               Origin(ent.id, "0", "0"))
        self._attach_predicates()
        for index, rule in enumerate(self.qr.rules):
            if rule.id in self.struct_counts:
                k = self.struct_counts[rule.id]
                if isinstance(rule.body, RepeatingRule):
                    self._apply_repeating(rule, index, k)
                elif isinstance(rule.body, ChainingRule):
                    self._apply_chaining(rule, index, k)
        return PatternGraph(list(self.nodes.values()), list(self.edges.values()))

    def _add_node(self, pid: str, predicates: tuple, origin: Origin):
        self.nodes[pid] = PatternNode(pid, predicates, origin)

    def _add_edge(self, pid: str, src: str, tgt: str, directed: bool,
                  predicates: tuple, origin: Origin, marker: PathMarker | None = None):
        self.edges[pid] = PatternEdge(pid, src, tgt, directed, predicates, origin, marker)

    def _config_rule(self, motif_id: str) -> Rule:
        for r in self.qr.rules:
            if r.target == motif_id and isinstance(r.body, MotifConfigRule):
                return r
        raise InstantiationError(f"motif {motif_id!r} has no configuration rule")

    def _build_motif(self, ent: MotifEntity):
        choice = self.motif_choice.get(ent.id)
        if choice is None:
            if ent.kind is MotifKind.PATH:
                head = _pid(ent.id, "0", "head")
                tail = _pid(ent.id, "0", "tail")
                self._add_node(head, (), Origin(ent.id, "0", "head"))
                self._add_node(tail, (), Origin(ent.id, "0", "tail"))
                min_nodes = rule_choices(self.qr, self._config_rule(ent.id), self.directed)[0]["nodes"]
                self._add_edge(_pid(ent.id, "0", "path"), head, tail, self.directed, (),
                               Origin(ent.id, "0", "path"), marker=PathMarker(min_nodes))
                self._attach[ent.id] = {"head": head, "tail": tail}
            else:
                rep = _pid(ent.id, "0", "0")
                self._add_node(rep, (), Origin(ent.id, "0", "0"))
                self._attach[ent.id] = {"rep": rep}
            return
        frag = _fragment_for_choice(ent.kind, choice, self.directed)
        pids = [_pid(ent.id, "0", str(i)) for i in range(frag.node_count)]
        for i, pid in enumerate(pids):
            self._add_node(pid, (), Origin(ent.id, "0", str(i)))
        for j, (a, b) in enumerate(frag.edges):
            self._add_edge(_pid(ent.id, "0", f"e{j}"), pids[a], pids[b], self.directed, (),
                           Origin(ent.id, "0", f"e{j}"))
        if ent.kind is MotifKind.PATH:
            self._attach[ent.id] = {"head": pids[frag.head], "tail": pids[frag.tail]}
        else:
            self._attach[ent.id] = {"rep": pids[frag.representative]}

    def _attach_point(self, ref: EntityRef) -> str:
        ent = self.entities[ref.entity_id]
        if isinstance(ent, NodeEntity):
            return _pid(ent.id, "0", "0")
        assert isinstance(ent, MotifEntity)
        points = self._attach[ent.id]
        if ent.kind is MotifKind.PATH:
            return points[ref.port]
        return points["rep"]

    # -- attribute rules

    def _attach_predicates(self):
        node_preds: dict[str, list[Predicate]] = {}
        edge_preds: dict[str, list[Predicate]] = {}
        for rule in self.qr.rules:
            if isinstance(rule.body, NodeAttrRule):
                for pid in self._entity_node_pids(rule.target):
                    node_preds.setdefault(pid, []).append(rule.body.predicate)
            elif isinstance(rule.body, EdgeAttrRule):
                for pid in self._entity_edge_pids(rule.target):
                    edge_preds.setdefault(pid, []).append(rule.body.predicate)
        for pid, preds in node_preds.items():
            n = self.nodes[pid]
            self.nodes[pid] = PatternNode(n.pid, tuple(preds), n.origin)
        for pid, preds in edge_preds.items():
            e = self.edges[pid]
            self.edges[pid] = PatternEdge(e.pid, e.source, e.target, e.directed,
                                          tuple(preds), e.origin, e.marker)

    def _entity_node_pids(self, entity_id: str) -> list[str]:
        ent = self.entities[entity_id]
        if isinstance(ent, (NodeEntity, MotifEntity)):
            return [p for p, n in self.nodes.items() if n.origin.entity_id == entity_id]
        if isinstance(ent, CustomEntity):
            out = []
            for m in ent.members:
                if isinstance(self.entities[m], (NodeEntity, MotifEntity)):
                    out.extend(self._entity_node_pids(m))
            return out
        return []

    def _entity_edge_pids(self, entity_id: str) -> list[str]:
        ent = self.entities[entity_id]
        if isinstance(ent, (EdgeEntity, MotifEntity)):
            return [p for p, e in self.edges.items() if e.origin.entity_id == entity_id]
        if isinstance(ent, CustomEntity):
            out = []
            for m in ent.members:
                if isinstance(self.entities[m], (EdgeEntity, MotifEntity)):
                    out.extend(self._entity_edge_pids(m))
            return out
        return []

    # -- structural rules

    def _scope_entities(self, entity_id: str) -> tuple[set[str], set[str]]:
        """(entity ids whose nodes are duplicated, member edge-entity ids)."""
        ent = self.entities[entity_id]
        if isinstance(ent, (NodeEntity, MotifEntity)):
            return {entity_id}, set()
        if isinstance(ent, CustomEntity):
            node_ents, edge_ents = set(), set()
            for m in ent.members:
                member = self.entities[m]
                if isinstance(member, (NodeEntity, MotifEntity)):
                    node_ents.add(m)
                elif isinstance(member, EdgeEntity):
                    edge_ents.add(m)
            return node_ents, edge_ents
        return set(), set()

    @staticmethod
    def _retag(copy: str, tag: str) -> str:
        return f"{copy}.{tag}"

    def _copy_node(self, node: PatternNode, tag: str) -> PatternNode:
        o = node.origin
        copy = self._retag(o.copy, tag)
        return PatternNode(_pid(o.entity_id, copy, o.local), node.predicates,
                           Origin(o.entity_id, copy, o.local))

    def _copy_edge(self, edge: PatternEdge, tag: str, endpoint_map: dict[str, str]) -> PatternEdge:
        o = edge.origin
        copy = self._retag(o.copy, tag)
        return PatternEdge(_pid(o.entity_id, copy, o.local),
                           endpoint_map.get(edge.source, edge.source),
                           endpoint_map.get(edge.target, edge.target),
                           edge.directed, edge.predicates,
                           Origin(o.entity_id, copy, o.local), edge.marker)

    def _apply_repeating(self, rule: Rule, rule_index: int, k: int):
        if k == 0:
            return
        target = self.entities[rule.target]
        if isinstance(target, EdgeEntity):
            # edge targets gain parallel copies only; endpoints are shared
            originals = [e for e in self.edges.values() if e.origin.entity_id == target.id]
            for c in range(1, k + 1):
                tag = f"{rule_index}x{c}"
                for e in originals:
                    copy = self._copy_edge(e, tag, {})
                    self.edges[copy.pid] = copy
            return
        node_ents, edge_ents = self._scope_entities(rule.target)
        inside = [n for n in self.nodes.values() if n.origin.entity_id in node_ents]
        if not inside:
            raise InstantiationError(f"repeat target {rule.target!r} has no materialized nodes")
        inside_pids = {n.pid for n in inside}
        edges_snapshot = list(self.edges.values())
        for c in range(1, k + 1):
            tag = f"{rule_index}x{c}"
            mapping: dict[str, str] = {}
            for n in inside:
                copy = self._copy_node(n, tag)
                self.nodes[copy.pid] = copy
                mapping[n.pid] = copy.pid
            for e in edges_snapshot:
                src_in = e.source in inside_pids
                tgt_in = e.target in inside_pids
                # interior and boundary edges are copied; boundary copies keep
                # their external endpoint, preserving the structural context
                if src_in or tgt_in or e.origin.entity_id in edge_ents:
                    copy = self._copy_edge(e, tag, mapping)
                    self.edges[copy.pid] = copy

    def _apply_chaining(self, rule: Rule, rule_index: int, k: int):
        if k == 0:
            return
        body = rule.body
        assert isinstance(body, ChainingRule)
        node_ents, _ = self._scope_entities(rule.target)
        inside = [n for n in self.nodes.values() if n.origin.entity_id in node_ents]
        if not inside:
            raise InstantiationError(f"chain target {rule.target!r} has no materialized nodes")
        inside_pids = {n.pid for n in inside}
        edges_snapshot = [e for e in self.edges.values()
                          if e.source in inside_pids and e.target in inside_pids]

        def anchor(entity_id: str) -> str:
            pids = sorted(p for p, n in self.nodes.items() if n.origin.entity_id == entity_id)
            if not pids:
                raise InstantiationError(f"chain node {entity_id!r} is not materialized")
            return pids[0]

        start0 = anchor(body.start_node)
        end0 = anchor(body.end_node)
        prev_end = end0
        for c in range(1, k + 1):
            tag = f"{rule_index}x{c}"
            mapping: dict[str, str] = {}
            merged_start = body.mode is ChainMode.SHARED
            for n in inside:
                if merged_start and n.pid == start0:
                    # this copy's start is unified with the previous copy's end
                    mapping[n.pid] = prev_end
                    merged = self.nodes[prev_end]
                    extra = tuple(p for p in n.predicates if p not in merged.predicates)
                    if extra:
                        self.nodes[prev_end] = PatternNode(
                            merged.pid, merged.predicates + extra, merged.origin)
                    continue
                copy = self._copy_node(n, tag)
                self.nodes[copy.pid] = copy
                mapping[n.pid] = copy.pid
            for e in edges_snapshot:
                copy = self._copy_edge(e, tag, mapping)
                self.edges[copy.pid] = copy
            if body.mode is ChainMode.LINKED:
                pid = _pid(rule.target, "0", f"link{c}")
                self._add_edge(pid, prev_end, mapping[start0], self.directed, (),
                               Origin(rule.target, "0", f"link{c}"))
            prev_end = mapping[end0]


def materialize(qr: QueryRepresentation, *, directed: bool,
                motif_choice: dict[str, Choice | None],
                struct_counts: dict[str, int]) -> PatternGraph:
    return _Builder(qr, directed, motif_choice, struct_counts).build()


# --- public construction ops ---------------------------------------------------

def _validated(qr: QueryRepresentation):
    diags = [d for d in validate(qr) if d.severity == "error"]
    if diags:
        raise InvalidRepresentationError(diags)


def build_backbone(qr: QueryRepresentation) -> QueryInstance:
    """The abstracted starting pattern: every entity once, repeat/chain targets
    unduplicated, non-path motifs as one representative node, paths as
    head/tail plus a path-abstraction marker."""
    _validated(qr)
    directed = qr.inferred_directed()
    motif_choice = {e.id: None for e in qr.entities if isinstance(e, MotifEntity)}
    pattern = materialize(qr, directed=directed, motif_choice=motif_choice, struct_counts={})
    return QueryInstance("backbone", pattern, {}, Backbone())


def _structural_rules(qr: QueryRepresentation) -> list[Rule]:
    return [r for r in qr.rules if r.is_structural()]


def _plan(qr: QueryRepresentation, directed: bool):
    """Per structural rule: its choice list. Single-outcome rules are the
    fully-specified side of the lattice; multi-outcome rules span it."""
    choices: dict[str, list[Choice]] = {}
    for r in _structural_rules(qr):
        ch = rule_choices(qr, r, directed)
        if not ch:
            raise InstantiationError(f"rule {r.id} admits no outcome")
        choices[r.id] = ch
    fully = [r.id for r in _structural_rules(qr) if len(choices[r.id]) == 1]
    under = [r.id for r in _structural_rules(qr) if len(choices[r.id]) > 1]
    return choices, fully, under


def _instance_pattern(qr: QueryRepresentation, directed: bool,
                      chosen: dict[str, Choice]) -> PatternGraph:
    motif_choice: dict[str, Choice | None] = {}
    struct_counts: dict[str, int] = {}
    for r in _structural_rules(qr):
        if r.id not in chosen:
            continue
        choice = chosen[r.id]
        if isinstance(r.body, MotifConfigRule):
            motif_choice[r.target] = choice
        elif isinstance(r.body, RepeatingRule):
            struct_counts[r.id] = choice["count"]
        else:
            struct_counts[r.id] = choice["iterations"]
    for e in qr.entities:
        if isinstance(e, MotifEntity):
            motif_choice.setdefault(e.id, None)
    return materialize(qr, directed=directed, motif_choice=motif_choice,
                       struct_counts=struct_counts)


def instantiate_fully_specified(qr: QueryRepresentation) -> tuple[list[QueryInstance], QueryInstance]:
    """(previews, final): one preview per single-outcome rule (backbone plus
    that rule alone), and the instance with all of them applied together."""
    _validated(qr)
    directed = qr.inferred_directed()
    choices, fully, _ = _plan(qr, directed)
    previews = []
    for rid in fully:
        pattern = _instance_pattern(qr, directed, {rid: choices[rid][0]})
        previews.append(QueryInstance(f"fs:{rid}", pattern, {rid: choices[rid][0]},
                                      FsRulePreview(rid)))
    final_assignment = {rid: choices[rid][0] for rid in fully}
    final = QueryInstance("fs-final", _instance_pattern(qr, directed, final_assignment),
                          dict(final_assignment), FsFinal())
    return previews, final


def _apply_single_rule(qr: QueryRepresentation, rule_id: str, k: int,
                       expected: type) -> PatternGraph:
    _validated(qr)
    rule = qr.rule(rule_id)
    if rule is None or not isinstance(rule.body, expected):
        raise InstantiationError(f"rule {rule_id!r} is not a {expected.__name__}")
    directed = qr.inferred_directed()
    motif_choice = {e.id: None for e in qr.entities if isinstance(e, MotifEntity)}
    return materialize(qr, directed=directed, motif_choice=motif_choice,
                       struct_counts={rule_id: k})


def apply_repeating(qr: QueryRepresentation, rule_id: str, k: int) -> PatternGraph:
    """Backbone plus one repeat rule at count k (k = 0 leaves it unchanged)."""
    return _apply_single_rule(qr, rule_id, k, RepeatingRule)


def apply_chaining(qr: QueryRepresentation, rule_id: str, k: int) -> PatternGraph:
    """Backbone plus one chain rule at k iterations."""
    return _apply_single_rule(qr, rule_id, k, ChainingRule)


def build_lattice(qr: QueryRepresentation, caps: LatticeCaps = LatticeCaps()) -> InstantiationLattice:
    _validated(qr)
    directed = qr.inferred_directed()
    choices, fully, under = _plan(qr, directed)
    previews, fs_final = instantiate_fully_specified(qr)
    budget = caps.max_instances - 2 - len(previews)

    def check_nodes(inst: QueryInstance):
        if len(inst.pattern.pnodes) > caps.max_pattern_nodes:
            raise LatticeSizeError(
                f"instance {inst.id} has {len(inst.pattern.pnodes)} pattern nodes "
                f"(cap {caps.max_pattern_nodes})", cell=inst.id,
                count=len(inst.pattern.pnodes))

    check_nodes(fs_final)
    for p in previews:
        check_nodes(p)

    layers: list[list[ComboCell]] = []
    n = len(under)
    total = 0
    for layer_k in range(1, n + 1):
        layer_cells: list[ComboCell] = []
        for combo in itertools.combinations(under, layer_k):
            cell_id = "cell:" + "~".join(combo)
            count = 1
            for rid in combo:
                count *= len(choices[rid])
            total += count
            if total > budget:
                raise LatticeSizeError(
                    f"lattice exceeds the instance cap ({caps.max_instances}): "
                    f"cell {cell_id} alone contributes {count} instances",
                    cell=cell_id, count=count)
            instances = []
            for idx, combo_choices in enumerate(itertools.product(*(choices[r] for r in combo))):
                chosen: dict[str, Choice] = {rid: choices[rid][0] for rid in fully}
                for rid in under:
                    chosen[rid] = choices[rid][0]
                for rid, ch in zip(combo, combo_choices):
                    chosen[rid] = ch
                inst = QueryInstance(f"{cell_id}:{idx}",
                                     _instance_pattern(qr, directed, chosen),
                                     chosen, Combo(layer_k, combo))
                check_nodes(inst)
                instances.append(inst)
            layer_cells.append(ComboCell(cell_id, layer_k, combo, instances))
        layers.append(layer_cells)

    flows: list[tuple[str, str]] = []
    for layer_k in range(1, n):
        for small in layers[layer_k - 1]:
            for big in layers[layer_k]:
                if set(small.rule_set) < set(big.rule_set):
                    flows.append((small.id, big.id))

    lattice = InstantiationLattice(qr, directed, build_backbone(qr), previews, fs_final,
                                   layers, flows, {}, under, fully)
    lattice.embeddings = _collect_witnesses(lattice, choices)
    return lattice


# --- witnesses ------------------------------------------------------------------

def _preds_subset(a: tuple, b: tuple) -> bool:
    return all(p in b for p in a)


def verify_witness(small: PatternGraph, large: PatternGraph,
                   node_map: dict[str, str], edge_map: dict[str, str]) -> bool:
    """Direct verification that (node_map, edge_map) is an injective
    pattern-into-pattern homomorphism preserving predicates and direction."""
    large_nodes = {n.pid: n for n in large.pnodes}
    large_edges = {e.pid: e for e in large.pedges}
    if len(set(node_map.values())) != len(node_map):
        return False
    if len(set(edge_map.values())) != len(edge_map):
        return False
    for node in small.pnodes:
        img = node_map.get(node.pid)
        if img is None or img not in large_nodes:
            return False
        if not _preds_subset(node.predicates, large_nodes[img].predicates):
            return False
    for edge in small.pedges:
        img_id = edge_map.get(edge.pid)
        if img_id is None or img_id not in large_edges:
            return False
        img = large_edges[img_id]
        if edge.marker is not None or img.marker is not None:
            return False
        if not _preds_subset(edge.predicates, img.predicates):
            return False
        s, t = node_map.get(edge.source), node_map.get(edge.target)
        if s is None or t is None:
            return False
        if edge.directed:
            if not img.directed or (img.source, img.target) != (s, t):
                return False
        else:
            if img.directed or {img.source, img.target} != ({s, t} if s != t else {s}):
                return False
            if (img.source, img.target) not in ((s, t), (t, s)):
                return False
    return True


def _natural_witness(small: PatternGraph, large: PatternGraph) -> Witness | None:
    """Identity-on-node-pids mapping, valid whenever the smaller instance's
    nodes are a subset of the larger's (repeat/chain growth, path/clique
    prefix growth). Edges are matched greedily by endpoints since parallel
    siblings are interchangeable copies."""
    large_node_ids = {n.pid for n in large.pnodes}
    node_map = {}
    for n in small.pnodes:
        if n.pid not in large_node_ids:
            return None
        node_map[n.pid] = n.pid
    between: dict[tuple[str, str], list[PatternEdge]] = {}
    for e in large.pedges:
        between.setdefault((e.source, e.target), []).append(e)
    edge_map: dict[str, str] = {}
    used: set[str] = set()
    for e in sorted(small.pedges, key=lambda x: x.pid):
        pool = [c for c in between.get((e.source, e.target), []) if c.directed == e.directed]
        if not e.directed and e.source != e.target:
            pool += [c for c in between.get((e.target, e.source), []) if not c.directed]
        chosen = None
        for cand in sorted(pool, key=lambda x: x.pid):
            if cand.pid in used or cand.marker is not None or e.marker is not None:
                continue
            if _preds_subset(e.predicates, cand.predicates):
                chosen = cand
                break
        if chosen is None:
            return None
        edge_map[e.pid] = chosen.pid
        used.add(chosen.pid)
    if verify_witness(small, large, node_map, edge_map):
        return Witness(tuple(sorted(node_map.items())), tuple(sorted(edge_map.items())))
    return None


def find_pattern_embedding(small: PatternGraph, large: PatternGraph,
                           step_budget: int = 200_000) -> Witness | None:
    """Search for an injective homomorphism small -> large (backtracking with
    predicate-containment and degree filtering). Returns the first witness in
    the deterministic search order, or None."""
    if small.has_markers() or large.has_markers():
        return None
    large_nodes = list(large.pnodes)
    small_deg = {n.pid: small.degree(n.pid) for n in small.pnodes}
    large_deg = {n.pid: large.degree(n.pid) for n in large.pnodes}
    candidates: dict[str, list[str]] = {}
    for sn in small.pnodes:
        sd = small_deg[sn.pid]
        cands = [ln.pid for ln in large_nodes
                 if _preds_subset(sn.predicates, ln.predicates)
                 and all(large_deg[ln.pid][i] >= sd[i] for i in range(3))]
        if not cands:
            return None
        candidates[sn.pid] = cands
    order = sorted((n.pid for n in small.pnodes), key=lambda p: (len(candidates[p]), p))

    small_adj: dict[str, list[PatternEdge]] = {p: [] for p in candidates}
    for e in small.pedges:
        small_adj[e.source].append(e)
        if e.target != e.source:
            small_adj[e.target].append(e)

    large_between: dict[tuple[str, str], list[PatternEdge]] = {}
    for e in large.pedges:
        large_between.setdefault((e.source, e.target), []).append(e)

    def edges_between(u: str, v: str, directed: bool) -> list[PatternEdge]:
        if directed:
            return [e for e in large_between.get((u, v), []) if e.directed]
        out = [e for e in large_between.get((u, v), []) if not e.directed]
        if u != v:
            out += [e for e in large_between.get((v, u), []) if not e.directed]
        return out

    node_map: dict[str, str] = {}
    edge_map: dict[str, str] = {}
    used_nodes: set[str] = set()
    used_edges: set[str] = set()
    steps = [0]

    def pending_edges(pid: str) -> list[PatternEdge]:
        return [e for e in small_adj[pid]
                if e.pid not in edge_map
                and (e.source == pid or e.source in node_map)
                and (e.target == pid or e.target in node_map)]

    def assign_edges(edges: list[PatternEdge], i: int) -> bool:
        if i == len(edges):
            return place(len(node_map))
        e = edges[i]
        u, v = node_map[e.source], node_map[e.target]
        pool = (edges_between(u, v, True) if e.directed else edges_between(u, v, False))
        for cand in pool:
            if cand.pid in used_edges or not _preds_subset(e.predicates, cand.predicates):
                continue
            edge_map[e.pid] = cand.pid
            used_edges.add(cand.pid)
            if assign_edges(edges, i + 1):
                return True
            del edge_map[e.pid]
            used_edges.remove(cand.pid)
        return False

    def place(depth: int) -> bool:
        steps[0] += 1
        if steps[0] > step_budget:
            return False
        if depth == len(order):
            return True
        pid = order[depth]
        for cand in candidates[pid]:
            if cand in used_nodes:
                continue
            node_map[pid] = cand
            used_nodes.add(cand)
            edges = sorted(pending_edges(pid), key=lambda e: e.pid)
            saved = dict(edge_map)
            if assign_edges(edges, 0):
                return True
            for k in list(edge_map):
                if k not in saved:
                    used_edges.remove(edge_map[k])
                    del edge_map[k]
            del node_map[pid]
            used_nodes.remove(cand)
        return False

    if place(0) and steps[0] <= step_budget:
        return Witness(tuple(sorted(node_map.items())), tuple(sorted(edge_map.items())))
    return None


def _witness_between(small: QueryInstance, large: QueryInstance,
                     search: bool = True) -> Witness | None:
    w = _natural_witness(small.pattern, large.pattern)
    if w is not None:
        return w
    if not search:
        return None
    return find_pattern_embedding(small.pattern, large.pattern, step_budget=50_000)


def _collect_witnesses(lattice: InstantiationLattice,
                       choices: dict[str, list[Choice]]) -> dict[tuple[str, str], Witness]:
    embeddings: dict[tuple[str, str], Witness] = {}

    def record(a: QueryInstance, b: QueryInstance, search: bool = True):
        if len(a.pattern.pnodes) > len(b.pattern.pnodes):
            a, b = b, a
        if (a.id, b.id) in embeddings:
            return
        w = _witness_between(a, b, search)
        if w is not None:
            embeddings[(a.id, b.id)] = w

    def rule_kind(rid: str) -> MotifKind | None:
        rule = lattice.qr.rule(rid)
        if rule is not None and isinstance(rule.body, MotifConfigRule):
            target = lattice.qr.entity(rule.target)
            if isinstance(target, MotifEntity):
                return target.kind
        return None

    def tree_step_plausible(rid: str, a: QueryInstance, b: QueryInstance) -> bool:
        """Tree witnesses require the smaller shape to be a rooted subtree of
        the larger (external edges attach at the root); checking the shapes
        themselves avoids hopeless searches over the full instances."""
        from .motifs import rooted_tree_shapes

        ca, cb = a.assignment[rid], b.assignment[rid]
        if ca == cb:
            return True
        sa = rooted_tree_shapes(ca["nodes"])[ca["shape"]]
        sb = rooted_tree_shapes(cb["nodes"])[cb["shape"]]
        if len(a.pattern.pnodes) > len(b.pattern.pnodes):
            sa, sb = sb, sa

        def embeds(s, t) -> bool:
            # injective matching of s's children into t's children
            def assign(i: int, used: set[int]) -> bool:
                if i == len(s):
                    return True
                for j in range(len(t)):
                    if j not in used and embeds(s[i], t[j]):
                        used.add(j)
                        if assign(i + 1, used):
                            used.remove(j)
                            return True
                        used.remove(j)
                return False

            return assign(0, set())

        return embeds(sa, sb)

    # within a cell: consecutive choices of one rule, all others fixed
    for layer in lattice.layers:
        for cell in layer:
            for rid in cell.rule_set:
                kind = rule_kind(rid)
                if kind is MotifKind.LOOP:
                    continue  # a k-cycle never embeds in a (k+1)-cycle
                # repeat/chain/path/clique growth yields a natural witness;
                # tree shape steps may need a bounded search
                search = kind is MotifKind.TREE
                groups: dict[tuple, list[QueryInstance]] = {}
                for inst in cell.instances:
                    key = tuple(sorted((r, tuple(sorted(c.items())))
                                       for r, c in inst.assignment.items() if r != rid))
                    groups.setdefault(key, []).append(inst)
                index_of = {tuple(sorted(c.items())): i for i, c in enumerate(choices[rid])}
                for insts in groups.values():
                    insts.sort(key=lambda i: index_of[tuple(sorted(i.assignment[rid].items()))])
                    for a, b in zip(insts, insts[1:]):
                        do_search = search and (kind is not MotifKind.TREE
                                                or tree_step_plausible(rid, a, b))
                        record(a, b, do_search)

    # across flows: the superset cell repeats each subset-cell instance with the
    # extra rule at its first choice; those pairs are identical patterns
    cell_by_id = {c.id: c for layer in lattice.layers for c in layer}
    for small_id, big_id in lattice.flows:
        small_cell, big_cell = cell_by_id[small_id], cell_by_id[big_id]
        big_by_assignment = {
            tuple(sorted((r, tuple(sorted(c.items()))) for r, c in inst.assignment.items())): inst
            for inst in big_cell.instances
        }
        for inst in small_cell.instances:
            key = tuple(sorted((r, tuple(sorted(c.items()))) for r, c in inst.assignment.items()))
            match = big_by_assignment.get(key)
            if match is not None:
                record(inst, match)
    return embeddings


# --- execution-time marker substitution -----------------------------------------

def executable_pattern(pattern: PatternGraph) -> PatternGraph:
    """Replace every path-abstraction marker with the concrete path at its
    minimum size. Patterns without markers are returned unchanged."""
    if not pattern.has_markers():
        return pattern
    nodes = {n.pid: n for n in pattern.pnodes}
    out_nodes: list[PatternNode] = list(pattern.pnodes)
    out_edges: list[PatternEdge] = []
    for e in pattern.pedges:
        if e.marker is None:
            out_edges.append(e)
            continue
        k = e.marker.min_nodes
        head = nodes[e.source]
        chain = [e.source]
        for i in range(1, k - 1):
            o = Origin(e.origin.entity_id, e.origin.copy, f"sub{i}")
            pid = _pid(o.entity_id, o.copy, o.local)
            out_nodes.append(PatternNode(pid, head.predicates, o))
            chain.append(pid)
        chain.append(e.target)
        for i in range(len(chain) - 1):
            o = Origin(e.origin.entity_id, e.origin.copy, f"sube{i}")
            out_edges.append(PatternEdge(_pid(o.entity_id, o.copy, o.local),
                                         chain[i], chain[i + 1], e.directed,
                                         e.predicates, o))
    return PatternGraph(out_nodes, out_edges)


# --- artifact serialization ------------------------------------------------------

def _stage_to_json(stage: Stage) -> dict:
    if isinstance(stage, Backbone):
        return {"kind": "backbone"}
    if isinstance(stage, FsRulePreview):
        return {"kind": "fs-preview", "rule": stage.rule_id}
    if isinstance(stage, FsFinal):
        return {"kind": "fs-final"}
    return {"kind": "combo", "layer": stage.layer, "ruleSet": list(stage.rule_set)}


def _instance_to_json(inst: QueryInstance) -> dict:
    return {
        "id": inst.id,
        "stage": _stage_to_json(inst.stage),
        "assignment": {rid: dict(sorted(c.items())) for rid, c in sorted(inst.assignment.items())},
        "pattern": pattern_to_json(inst.pattern),
    }


def lattice_to_json(lattice: InstantiationLattice) -> dict:
    from .model import qr_to_json

    return {
        "query": lattice.qr.name,
        "representation": qr_to_json(lattice.qr),
        "directed": lattice.directed,
        "fullySpecifiedRules": list(lattice.fully_specified),
        "underspecifiedRules": list(lattice.underspecified),
        "backbone": _instance_to_json(lattice.backbone),
        "fsPreviews": [_instance_to_json(p) for p in lattice.fs_previews],
        "fsFinal": _instance_to_json(lattice.fs_final),
        "layers": [
            [
                {
                    "id": cell.id,
                    "layer": cell.layer,
                    "ruleSet": list(cell.rule_set),
                    "instances": [_instance_to_json(i) for i in cell.instances],
                }
                for cell in layer
            ]
            for layer in lattice.layers
        ],
        "flows": [{"from": a, "to": b} for a, b in lattice.flows],
        "embeddings": [
            {"from": a, "to": b, "nodes": dict(w.nodes), "edges": dict(w.edges)}
            for (a, b), w in sorted(lattice.embeddings.items())
        ],
    }


def lattice_json_text(lattice: InstantiationLattice) -> str:
    return json.dumps(lattice_to_json(lattice), indent=2, sort_keys=True) + "\n"
