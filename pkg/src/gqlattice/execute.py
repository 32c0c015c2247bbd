"""Progressive execution over an instantiation lattice.

Steps are executed on demand, never auto-cascaded; the suggested order is
backbone, rule previews, fully-specified instance, then combination layers
ascending. Each instance run records a status (empty / found with count).
Empty instances prune: every instance reachable from an empty one through
recorded embedding witnesses is guaranteed empty and is marked without
running the matcher. Abstract steps (backbone/previews/fully-specified) run
with path abstractions substituted at their minimum size.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from .graph import PropertyGraph
from .instantiate import InstantiationLattice, executable_pattern
from .matcher import MatchOptions, MatchResult, match

DEFAULT_STEP_LIMIT = 100

NOT_RUN = "not-run"
EMPTY = "empty"
FOUND = "found"
PRUNED_EMPTY = "pruned-empty"


class UnknownStepError(KeyError):
    pass


class NotExecutedError(ValueError):
    pass


@dataclass(frozen=True)
class InstanceStatus:
    kind: str = NOT_RUN
    count: int = 0
    complete: bool = True
    cause: str | None = None  # pruning: the empty instance this one depends on


@dataclass
class StepRecord:
    step: str
    limit: int | None
    executed: list[str]
    skipped_pruned: list[str]
    started_at: float  # wall clock; in-memory only, never exported


@dataclass
class ExecutionState:
    statuses: dict[str, InstanceStatus] = field(default_factory=dict)
    results: dict[str, list[MatchResult]] = field(default_factory=dict)
    steps: list[StepRecord] = field(default_factory=list)

    def status(self, instance_id: str) -> InstanceStatus:
        return self.statuses.get(instance_id, InstanceStatus())


@dataclass(frozen=True)
class FrequencyOverview:
    node_freq: dict[str, int]
    edge_freq: dict[str, int]
    over: tuple[str, ...]


@dataclass(frozen=True)
class ResultGroup:
    instance_id: str
    structure: object  # the instance's PatternGraph
    embeddings: list[MatchResult]
    complete: bool


def execute_step(lattice: InstantiationLattice, graph: PropertyGraph,
                 state: ExecutionState, step: str,
                 opts: MatchOptions | None = None) -> ExecutionState:
    """Run every instance under the step (unless already pruned) and record
    statuses. Re-running with a larger limit replaces stored results; by
    deterministic search order the old results are a prefix of the new."""
    if opts is None:
        opts = MatchOptions(limit=DEFAULT_STEP_LIMIT)
    try:
        instances = lattice.resolve_step(step)
    except KeyError:
        raise UnknownStepError(step) from None
    record = StepRecord(step, opts.limit, [], [], time.time())
    for inst in instances:
        st = state.status(inst.id)
        if st.kind == PRUNED_EMPTY:
            record.skipped_pruned.append(inst.id)
            continue
        results, complete = match(executable_pattern(inst.pattern), graph, opts)
        record.executed.append(inst.id)
        if results:
            state.statuses[inst.id] = InstanceStatus(FOUND, len(results), complete)
            state.results[inst.id] = results
        elif complete:
            state.statuses[inst.id] = InstanceStatus(EMPTY, 0, True)
            state.results[inst.id] = []
        else:
            # ran out of budget before finding anything: no conclusion
            state.statuses[inst.id] = InstanceStatus(NOT_RUN, 0, False)
    state.steps.append(record)
    return state


def propagate_pruning(lattice: InstantiationLattice, state: ExecutionState) -> ExecutionState:
    """Mark as pruned-empty every not-run instance reachable from an empty
    instance through the lattice's witness chain; embeddings guarantee the
    smaller instance's emptiness implies the larger one's."""
    forward: dict[str, list[str]] = {}
    for small_id, large_id in lattice.embeddings:
        forward.setdefault(small_id, []).append(large_id)
    empties = [inst.id for inst in lattice.all_instances()
               if state.status(inst.id).kind == EMPTY]
    for root in empties:
        stack = list(forward.get(root, []))
        seen: set[str] = set()
        while stack:
            cur = stack.pop()
            if cur in seen:
                continue
            seen.add(cur)
            if state.status(cur).kind == NOT_RUN:
                state.statuses[cur] = InstanceStatus(PRUNED_EMPTY, 0, True, cause=root)
            stack.extend(forward.get(cur, []))
    return state


def aggregate(state: ExecutionState, instance_ids: list[str]) -> FrequencyOverview:
    """Per-data-node/edge occurrence counts across the stored results of the
    selected instances. Selecting a never-executed instance is an error;
    empty and pruned instances contribute nothing."""
    node_freq: dict[str, int] = {}
    edge_freq: dict[str, int] = {}
    for iid in instance_ids:
        st = state.status(iid)
        if st.kind == NOT_RUN:
            raise NotExecutedError(f"instance {iid!r} has not been executed")
        for res in state.results.get(iid, []):
            for nid in res.node_map.values():
                node_freq[nid] = node_freq.get(nid, 0) + 1
            for eid in res.edge_map.values():
                edge_freq[eid] = edge_freq.get(eid, 0) + 1
    return FrequencyOverview(node_freq, edge_freq, tuple(instance_ids))


def group_results(lattice: InstantiationLattice, state: ExecutionState,
                  instance_id: str) -> ResultGroup:
    """The stored embeddings of one found instance, in matcher order."""
    st = state.status(instance_id)
    if st.kind in (NOT_RUN,):
        raise NotExecutedError(f"instance {instance_id!r} has not been executed")
    if st.kind in (EMPTY, PRUNED_EMPTY):
        raise NotExecutedError(f"instance {instance_id!r} has no results")
    inst = lattice.instance(instance_id)
    return ResultGroup(instance_id, inst.pattern if inst else None,
                       list(state.results.get(instance_id, [])), st.complete)


# --- artifact export -------------------------------------------------------------

def state_to_json(lattice: InstantiationLattice, state: ExecutionState) -> dict:
    """Deterministic results artifact: statuses, stored embeddings, overview
    maps over every instance with results. Wall-clock data is omitted so two
    identical runs serialize byte-identically."""
    statuses = {}
    for inst in lattice.all_instances():
        st = state.status(inst.id)
        entry = {
            "status": st.kind,
            "assignment": {rid: dict(sorted(c.items())) for rid, c in sorted(inst.assignment.items())},
        }
        if st.kind == FOUND:
            entry["count"] = st.count
            entry["complete"] = st.complete
        if st.cause is not None:
            entry["cause"] = st.cause
        statuses[inst.id] = entry
    results = {
        iid: [{"nodes": dict(sorted(r.node_map.items())),
               "edges": dict(sorted(r.edge_map.items()))} for r in res]
        for iid, res in sorted(state.results.items())
    }
    found_ids = [inst.id for inst in lattice.all_instances()
                 if state.status(inst.id).kind == FOUND]
    overview = aggregate(state, found_ids)
    return {
        "query": lattice.qr.name,
        "statuses": statuses,
        "results": results,
        "overview": {
            "nodes": dict(sorted(overview.node_freq.items())),
            "edges": dict(sorted(overview.edge_freq.items())),
            "over": list(found_ids),
        },
        "steps": [{"step": s.step, "limit": s.limit, "executed": s.executed,
                   "skippedPruned": s.skipped_pruned} for s in state.steps],
    }


def state_json_text(lattice: InstantiationLattice, state: ExecutionState) -> str:
    return json.dumps(state_to_json(lattice, state), indent=2, sort_keys=True) + "\n"


def overview_from_artifact(artifact: dict, instance_ids: list[str]) -> FrequencyOverview:
    """Recompute a frequency overview from an exported results artifact."""
    node_freq: dict[str, int] = {}
    edge_freq: dict[str, int] = {}
    statuses = artifact.get("statuses", {})
    results = artifact.get("results", {})
    for iid in instance_ids:
        if iid not in statuses:
            raise UnknownStepError(iid)
        if statuses[iid]["status"] == NOT_RUN:
            raise NotExecutedError(f"instance {iid!r} has not been executed")
        for res in results.get(iid, []):
            for nid in res["nodes"].values():
                node_freq[nid] = node_freq.get(nid, 0) + 1
            for eid in res["edges"].values():
                edge_freq[eid] = edge_freq.get(eid, 0) + 1
    return FrequencyOverview(node_freq, edge_freq, tuple(instance_ids))
