"""Backtracking subgraph matcher: finds node- and edge-injective embeddings of
a concrete pattern into a property graph.

Semantics: node mapping injective, edge mapping injective (parallel pattern
edges need distinct data edges), direction respected on directed graphs,
undirected pattern edges match either stored orientation, and every predicate
on a pattern element must hold on its image. Predicates over missing or
differently-typed attributes are simply unsatisfied, never errors.
Automorphic embeddings are distinct results.

Engine: bitset-domain backtracking. Candidate domains are prefiltered by
predicates, degree coverage, and per-edge support, then refined to arc
consistency. Variables follow a smallest-domain/conflict-weight order,
candidates run in graph insertion order. Interchangeable pattern nodes
(pairwise swaps that are pattern automorphisms, e.g. the non-representative
members of an expanded clique) are searched in canonical form only - images
increasing along the class - and every found embedding is expanded through
the class permutations, which enumerates exactly the full result set without
re-searching. All ordering rules are pure functions of (pattern, graph), so
the result sequence is deterministic and limit-stable: a run with limit k
returns the first k results of the unlimited run.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

from .graph import PropertyGraph
from .pattern import PatternEdge, PatternGraph


class MatchSetupError(ValueError):
    pass


@dataclass(frozen=True)
class MatchOptions:
    limit: int | None = None
    time_budget: float | None = None  # seconds
    count_only: bool = False

    def __post_init__(self):
        if self.limit is not None and self.limit < 1:
            raise ValueError("limit must be >= 1")


@dataclass(frozen=True)
class MatchResult:
    node_map: dict[str, str]
    edge_map: dict[str, str]

    def key(self) -> tuple:
        return (tuple(sorted(self.node_map.items())), tuple(sorted(self.edge_map.items())))


@dataclass
class _Search:
    results: list[MatchResult] = field(default_factory=list)
    count: int = 0
    complete: bool = True


def _check_setup(pattern: PatternGraph, g: PropertyGraph):
    if pattern.has_markers():
        raise MatchSetupError("pattern contains path-abstraction markers; expand it first")
    for e in pattern.pedges:
        if e.directed != g.directed:
            kind = "directed" if e.directed else "undirected"
            gkind = "directed" if g.directed else "undirected"
            raise MatchSetupError(
                f"{kind} pattern edge {e.pid!r} cannot run on an {gkind} graph")


def _iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _pred_key(preds) -> tuple:
    return tuple(sorted((p.attr, p.op.value, repr(p.literal)) for p in preds))


def interchangeable_classes(pattern: PatternGraph) -> list[list[str]]:
    """Partition pattern nodes into classes of mutually swappable nodes: a
    class contains nodes where exchanging any two (leaving the rest in place)
    is a pattern automorphism. Verified transpositions generate the full
    symmetric group on each class, so permuting a class's images in any valid
    embedding yields exactly the orbit of distinct embeddings."""
    by_pid: dict[str, list[PatternEdge]] = {n.pid: [] for n in pattern.pnodes}
    for e in pattern.pedges:
        by_pid[e.source].append(e)
        if e.target != e.source:
            by_pid[e.target].append(e)

    def profile(pid: str, other: str) -> dict:
        """Multiset of edge shapes from pid toward each third node, plus
        self-loop and pid<->other summaries."""
        toward: dict[tuple, int] = {}
        loops: dict[tuple, int] = {}
        between: dict[tuple, int] = {}
        for e in by_pid[pid]:
            preds = _pred_key(e.predicates)
            if e.source == e.target:
                loops[(e.directed, preds)] = loops.get((e.directed, preds), 0) + 1
                continue
            far = e.target if e.source == pid else e.source
            role = "u" if not e.directed else ("out" if e.source == pid else "in")
            if far == other:
                between[(role, preds)] = between.get((role, preds), 0) + 1
            else:
                toward[(far, role, preds)] = toward.get((far, role, preds), 0) + 1
        return {"toward": toward, "loops": loops, "between": between}

    def swappable(p: str, q: str) -> bool:
        pp, qq = profile(p, q), profile(q, p)
        if pp["toward"] != qq["toward"] or pp["loops"] != qq["loops"]:
            return False
        # edges between p and q must be invariant under the swap: out-edges
        # p->q exchange with out-edges q->p
        pb, qb = pp["between"], qq["between"]
        for role in ("u", "out", "in"):
            for key, cnt in {k: c for k, c in pb.items() if k[0] == role}.items():
                if qb.get(key, 0) != cnt:
                    return False
            for key, cnt in {k: c for k, c in qb.items() if k[0] == role}.items():
                if pb.get(key, 0) != cnt:
                    return False
        return True

    coarse: dict[tuple, list[str]] = {}
    for n in pattern.pnodes:
        coarse.setdefault(_pred_key(n.predicates), []).append(n.pid)

    classes: list[list[str]] = []
    for pids in coarse.values():
        pids = sorted(pids)
        remaining = list(pids)
        while remaining:
            seed = remaining.pop(0)
            cls = [seed]
            rest = []
            for other in remaining:
                if all(swappable(member, other) for member in cls):
                    cls.append(other)
                else:
                    rest.append(other)
            remaining = rest
            if len(cls) > 1:
                classes.append(cls)
    return sorted(classes)


def _search(pattern: PatternGraph, g: PropertyGraph, opts: MatchOptions) -> _Search:
    _check_setup(pattern, g)
    state = _Search()

    if not pattern.pnodes:
        if not opts.count_only:
            state.results.append(MatchResult({}, {}))
        state.count = 1
        return state

    node_index = {nid: i for i, nid in enumerate(g.node_ids)}
    n_data = len(g.node_ids)
    full_mask = (1 << n_data) - 1

    # Per pattern edge: adjacency bitmasks over data nodes and the concrete
    # data-edge pools per endpoint pair. Predicates are evaluated once per
    # (pattern edge, data edge).
    fwd: dict[str, list[int]] = {}  # source image -> mask of feasible target images
    bwd: dict[str, list[int]] = {}
    pools: dict[str, dict[tuple[int, int], list[str]]] = {}
    for e in pattern.pedges:
        f = [0] * n_data
        b = [0] * n_data
        pool: dict[tuple[int, int], list[str]] = {}
        for eid in g.edge_ids:
            de = g.edges[eid]
            if not all(p.matches(de.attrs) for p in e.predicates):
                continue
            u, w = node_index[de.source], node_index[de.target]
            f[u] |= 1 << w
            b[w] |= 1 << u
            pool.setdefault((u, w), []).append(eid)
            if not e.directed:
                f[w] |= 1 << u
                b[u] |= 1 << w
                if u != w:
                    pool.setdefault((w, u), []).append(eid)
        fwd[e.pid] = f
        bwd[e.pid] = b
        pools[e.pid] = pool

    adjacent: dict[str, list[PatternEdge]] = {pn.pid: [] for pn in pattern.pnodes}
    self_loops: dict[str, list[PatternEdge]] = {pn.pid: [] for pn in pattern.pnodes}
    for e in pattern.pedges:
        if e.source == e.target:
            self_loops[e.source].append(e)
        else:
            adjacent[e.source].append(e)
            adjacent[e.target].append(e)

    # Initial domains: node predicates, degree coverage, per-edge support,
    # self-loop support.
    domains: dict[str, int] = {}
    for pn in pattern.pnodes:
        want = pattern.degree(pn.pid)
        mask = 0
        for idx, nid in enumerate(g.node_ids):
            have = g.degree(nid)
            if have[0] < want[0] or have[1] < want[1] or have[2] < want[2]:
                continue
            if not all(p.matches(g.nodes[nid].attrs) for p in pn.predicates):
                continue
            mask |= 1 << idx
        for e in adjacent[pn.pid]:
            support = 0
            table = fwd[e.pid] if e.source == pn.pid else bwd[e.pid]
            for idx in _iter_bits(mask):
                if table[idx]:
                    support |= 1 << idx
            mask &= support
        for e in self_loops[pn.pid]:
            support = 0
            for idx in _iter_bits(mask):
                if fwd[e.pid][idx] & (1 << idx):
                    support |= 1 << idx
            mask &= support
        if not mask:
            return state
        domains[pn.pid] = mask

    # Arc-consistency refinement to a fixpoint. Bit order never changes, so
    # determinism is unaffected.
    queue = list(pattern.pedges)
    while queue:
        arcs, queue = queue, []
        changed: set[str] = set()
        for e in arcs:
            if e.source == e.target:
                continue
            for here, there, table in ((e.source, e.target, fwd[e.pid]),
                                       (e.target, e.source, bwd[e.pid])):
                dom_there = domains[there]
                keep = 0
                for idx in _iter_bits(domains[here]):
                    if table[idx] & dom_there & ~(1 << idx):
                        keep |= 1 << idx
                if keep != domains[here]:
                    if not keep:
                        return state
                    domains[here] = keep
                    changed.add(here)
        if changed:
            queue = [e for e in pattern.pedges
                     if (e.source in changed or e.target in changed) and e.source != e.target]

    # Interchangeability classes: search canonical forms (images increasing
    # along each class), expand orbits on emission.
    classes = interchangeable_classes(pattern)
    class_info: dict[str, tuple[int, int]] = {}  # pid -> (class index, slot)
    for ci, cls in enumerate(classes):
        for slot, pid in enumerate(cls):
            class_info[pid] = (ci, slot)

    deadline = None if opts.time_budget is None else time.monotonic() + opts.time_budget
    tick = [0]
    order_pids = sorted(domains)
    weight: dict[str, int] = {p: 1 for p in order_pids}
    assignment: dict[str, int] = {}  # pid -> data node index
    used_mask = [0]
    pattern_edges_sorted = sorted(pattern.pedges, key=lambda e: e.pid)

    def out_of_time() -> bool:
        if deadline is None:
            return False
        tick[0] += 1
        if tick[0] % 512 == 0 and time.monotonic() > deadline:
            state.complete = False
            return True
        return False

    def count_edge_assignments() -> int:
        """Number of injective edge assignments for the current node map."""
        def walk(i: int, used: set[str]) -> int:
            if i == len(pattern_edges_sorted):
                return 1
            e = pattern_edges_sorted[i]
            key = (assignment[e.source], assignment[e.target])
            total = 0
            for eid in pools[e.pid].get(key, ()):
                if eid not in used:
                    used.add(eid)
                    total += walk(i + 1, used)
                    used.remove(eid)
            return total
        return walk(0, set())

    def emit() -> bool:
        """Expand the canonical node mapping through class permutations and
        edge multiplicity, in deterministic order. Returns False to stop the
        whole search (limit reached or budget exhausted)."""
        if opts.count_only:
            per_variant = count_edge_assignments()
            if per_variant == 0:
                return True
            orbit = math.prod(math.factorial(len(cls)) for cls in classes
                              if all(p in assignment for p in cls))
            total = per_variant * orbit
            if opts.limit is not None and state.count + total >= opts.limit:
                state.count = opts.limit
                state.complete = False
                return False
            state.count += total
            return True

        # edge-assignment feasibility is invariant under class permutations;
        # if the canonical variant admits none, the whole orbit is barren
        def feasible(i: int, used: set[str]) -> bool:
            if i == len(pattern_edges_sorted):
                return True
            e = pattern_edges_sorted[i]
            key = (assignment[e.source], assignment[e.target])
            for eid in pools[e.pid].get(key, ()):
                if eid not in used:
                    used.add(eid)
                    if feasible(i + 1, used):
                        used.remove(eid)
                        return True
                    used.remove(eid)
            return False

        if not feasible(0, set()):
            return True

        variant_axes = []
        for cls in classes:
            images = [assignment[p] for p in cls]
            variant_axes.append([dict(zip(cls, perm)) for perm in itertools.permutations(images)])

        base = dict(assignment)
        for combo in itertools.product(*variant_axes):
            variant = dict(base)
            for sub in combo:
                variant.update(sub)

            chosen: dict[str, str] = {}
            used_edges: set[str] = set()

            def walk(i: int) -> bool:
                if i == len(pattern_edges_sorted):
                    state.count += 1
                    node_map = {pid: g.node_ids[idx] for pid, idx in variant.items()}
                    state.results.append(MatchResult(node_map, dict(chosen)))
                    if opts.limit is not None and state.count >= opts.limit:
                        state.complete = False
                        return False
                    return True
                e = pattern_edges_sorted[i]
                key = (variant[e.source], variant[e.target])
                for eid in pools[e.pid].get(key, ()):
                    if eid in used_edges:
                        continue
                    chosen[e.pid] = eid
                    used_edges.add(eid)
                    ok = walk(i + 1)
                    used_edges.remove(eid)
                    del chosen[e.pid]
                    if not ok:
                        return False
                return True

            if not walk(0):
                return False
        return True

    def place(doms: dict[str, int]) -> bool:
        if out_of_time():
            return False
        if len(assignment) == len(order_pids):
            return emit()
        pid = min((p for p in order_pids if p not in assignment),
                  key=lambda p: ((doms[p] & ~used_mask[0]).bit_count() / weight[p], p))
        avail = doms[pid] & ~used_mask[0]
        if not avail:
            weight[pid] += 1
            return True
        for idx in _iter_bits(avail):
            bit = 1 << idx
            narrowed = doms
            dead = None

            def clip(other: str, mask: int):
                nonlocal narrowed, dead
                nd = narrowed[other] & mask
                if nd != narrowed[other]:
                    if not nd:
                        dead = other
                        return False
                    if narrowed is doms:
                        narrowed = dict(doms)
                    narrowed[other] = nd
                return True

            ok = True
            for e in adjacent[pid]:
                other = e.target if e.source == pid else e.source
                if other in assignment:
                    continue
                table = fwd[e.pid] if e.source == pid else bwd[e.pid]
                if not clip(other, table[idx] & ~bit):
                    ok = False
                    break
            if ok and pid in class_info:
                ci, slot = class_info[pid]
                cls = classes[ci]
                below = bit - 1
                above = full_mask & ~((bit << 1) - 1)
                for other in cls:
                    if other in assignment or other == pid:
                        continue
                    bound = below if class_info[other][1] < slot else above
                    if not clip(other, bound):
                        ok = False
                        break
            if not ok:
                weight[dead] += 1
                continue
            assignment[pid] = idx
            used_mask[0] |= bit
            keep_going = place(narrowed)
            used_mask[0] &= ~bit
            del assignment[pid]
            if not keep_going:
                return False
        return True

    place(domains)
    return state


def match(pattern: PatternGraph, g: PropertyGraph,
          opts: MatchOptions = MatchOptions()) -> tuple[list[MatchResult], bool]:
    """All injective embeddings of pattern into g, up to limit/time budget.

    Returns (results, complete); complete is True iff the search space was
    exhausted. The empty pattern yields exactly one empty embedding."""
    state = _search(pattern, g, opts)
    return (state.results, state.complete)


def count(pattern: PatternGraph, g: PropertyGraph,
          opts: MatchOptions = MatchOptions()) -> tuple[int, bool]:
    """Number of embeddings (honoring limit/budget); equals len(match(...))
    whenever both runs are complete."""
    counting = MatchOptions(limit=opts.limit, time_budget=opts.time_budget, count_only=True)
    state = _search(pattern, g, counting)
    return (state.count, state.complete)
