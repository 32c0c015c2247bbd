import random

import pytest

from gqlattice.dsl import parse
from gqlattice.execute import (
    ExecutionState,
    NotExecutedError,
    UnknownStepError,
    aggregate,
    execute_step,
    group_results,
    propagate_pruning,
    state_to_json,
)
from gqlattice.graph import load_graph
from gqlattice.instantiate import LatticeCaps, LatticeSizeError, build_lattice, executable_pattern
from gqlattice.matcher import MatchOptions, match
from genqr import random_representation
from conftest import simple_graph


def star_graph(spokes=3, directed=True):
    nodes = [("hub", {"label": "hub"})] + [(f"s{i}", {"label": "spoke"}) for i in range(spokes)]
    edges = [(f"e{i}", "hub", f"s{i}", {"value": i}) for i in range(spokes)]
    return simple_graph(directed, nodes, edges)


def spoke_query(max_repeat=3):
    return parse(f'''query "star" {{
      node h;
      node s;
      edge e = h -> s;
      rule attr node h: label == "hub";
      rule repeat s: count = 0..{max_repeat};
    }}''')


def test_execute_final_statuses():
    g = star_graph(spokes=3)
    lattice = build_lattice(spoke_query(3))
    state = ExecutionState()
    execute_step(lattice, g, state, "final", MatchOptions(limit=10))
    kinds = [state.status(i.id).kind for i in lattice.final_cell().instances]
    # 1..3 spokes exist; 4 distinct spokes do not
    assert kinds == ["found", "found", "found", "empty"]


def test_pruning_propagates_along_witnesses():
    g = star_graph(spokes=1)
    lattice = build_lattice(spoke_query(3))
    state = ExecutionState()
    cell = lattice.final_cell()
    # execute only the two-spoke instance: empty (just one spoke exists)
    execute_step(lattice, g, state, cell.instances[1].id, MatchOptions(limit=5))
    assert state.status(cell.instances[1].id).kind == "empty"
    propagate_pruning(lattice, state)
    assert state.status(cell.instances[2].id).kind == "pruned-empty"
    assert state.status(cell.instances[3].id).kind == "pruned-empty"
    assert state.status(cell.instances[3].id).cause == cell.instances[1].id
    # smaller instances are untouched
    assert state.status(cell.instances[0].id).kind == "not-run"


def test_pruned_step_skips_matcher():
    g = star_graph(spokes=1)
    lattice = build_lattice(spoke_query(3))
    state = ExecutionState()
    cell = lattice.final_cell()
    execute_step(lattice, g, state, cell.instances[1].id)
    propagate_pruning(lattice, state)
    before = dict(state.statuses)
    execute_step(lattice, g, state, cell.instances[3].id)
    assert state.statuses == before
    assert state.steps[-1].skipped_pruned == [cell.instances[3].id]


def test_no_empty_instances_propagation_is_identity():
    g = star_graph(spokes=3)
    lattice = build_lattice(spoke_query(2))
    state = ExecutionState()
    execute_step(lattice, g, state, "final")
    before = dict(state.statuses)
    propagate_pruning(lattice, state)
    assert state.statuses == before


def test_loop_size_empty_does_not_prune_larger():
    g = simple_graph(False, [(x, {}) for x in "abcd"],
                     [("e1", "a", "b"), ("e2", "b", "c"), ("e3", "c", "d"), ("e4", "d", "a")])
    lattice = build_lattice(parse('query "loops" { motif L = loop(nodes=3..4); }'))
    state = ExecutionState()
    cell = lattice.final_cell()
    execute_step(lattice, g, state, cell.instances[0].id)  # 3-loop: empty here
    assert state.status(cell.instances[0].id).kind == "empty"
    propagate_pruning(lattice, state)
    # no witness connects loop sizes, so the 4-loop instance stays unknown
    assert state.status(cell.instances[1].id).kind == "not-run"


def test_pruning_soundness_randomized():
    rng = random.Random(17)
    verified = 0
    for _ in range(40):
        qr = random_representation(rng)
        try:
            lattice = build_lattice(qr, LatticeCaps(max_instances=300, max_pattern_nodes=60))
        except LatticeSizeError:
            continue
        if not lattice.layers:
            continue
        n = rng.randint(3, 8)
        nodes = [(f"v{i}", {"label": rng.choice(["heist", "acct"]),
                            "name": f"v{i}", "value": rng.randint(0, 300),
                            "weight": rng.random(), "x_1": rng.randint(0, 2),
                            "kind of thing": "k"}) for i in range(n)]
        edges = [(f"e{i}", f"v{rng.randrange(n)}", f"v{rng.randrange(n)}",
                  {"value": rng.randint(-5, 300), "weight": rng.random()})
                 for i in range(rng.randint(2, 12))]
        directed = lattice.directed
        g = simple_graph(directed, nodes, edges)
        state = ExecutionState()
        try:
            execute_step(lattice, g, state, "layer:1", MatchOptions(limit=3))
        except Exception:
            continue
        propagate_pruning(lattice, state)
        for inst in lattice.all_instances():
            if state.status(inst.id).kind == "pruned-empty":
                res, complete = match(executable_pattern(inst.pattern), g,
                                      MatchOptions(limit=1))
                assert res == [], f"unsound prune of {inst.id}"
                verified += 1
    assert verified >= 5


def test_rerun_with_larger_limit_extends_prefix():
    g = star_graph(spokes=3)
    lattice = build_lattice(spoke_query(1))
    state = ExecutionState()
    iid = lattice.final_cell().instances[0].id
    execute_step(lattice, g, state, iid, MatchOptions(limit=1))
    first = [r.key() for r in state.results[iid]]
    execute_step(lattice, g, state, iid, MatchOptions(limit=10))
    second = [r.key() for r in state.results[iid]]
    assert second[:1] == first
    assert len(second) == 3


def test_backbone_step_with_markers_executes_at_minimum():
    qr = parse('''query "p" {
      node a;
      motif P = path(nodes=3..4);
      edge e = a -> P.head;
    }''')
    g = simple_graph(True, [(f"v{i}", {}) for i in range(4)],
                     [(f"e{i}", f"v{i}", f"v{i+1}") for i in range(3)])
    lattice = build_lattice(qr)
    state = ExecutionState()
    execute_step(lattice, g, state, "backbone", MatchOptions(limit=10))
    assert state.status("backbone").kind == "found"


def test_unknown_step_raises():
    lattice = build_lattice(parse('query "q" { node a; }'))
    with pytest.raises(UnknownStepError):
        execute_step(lattice, star_graph(1), ExecutionState(), "cell:nope")


def test_aggregate_counts_and_errors():
    g = star_graph(spokes=2)
    lattice = build_lattice(spoke_query(1))
    state = ExecutionState()
    execute_step(lattice, g, state, "final", MatchOptions(limit=10))
    cell = lattice.final_cell()
    found = [i.id for i in cell.instances]
    ov = aggregate(state, found)
    # hub appears in every stored embedding
    total_embeddings = sum(len(state.results[i]) for i in found)
    assert ov.node_freq["hub"] == total_embeddings
    # node-frequency total equals pattern-node count summed over results
    expect_nodes = sum(len(r.node_map) for i in found for r in state.results[i])
    assert sum(ov.node_freq.values()) == expect_nodes
    with pytest.raises(NotExecutedError):
        aggregate(state, ["backbone"])
    empty = aggregate(state, [])
    assert empty.node_freq == {} and empty.edge_freq == {}


def test_group_results():
    g = star_graph(spokes=2)
    lattice = build_lattice(spoke_query(1))
    state = ExecutionState()
    cell = lattice.final_cell()
    execute_step(lattice, g, state, cell.instances[0].id, MatchOptions(limit=1))
    grp = group_results(lattice, state, cell.instances[0].id)
    assert len(grp.embeddings) == 1
    assert grp.complete is False  # limit 1 of 2 results
    with pytest.raises(NotExecutedError):
        group_results(lattice, state, cell.instances[1].id)


def test_state_artifact_deterministic():
    g = star_graph(spokes=2)
    lattice = build_lattice(spoke_query(2))
    s1, s2 = ExecutionState(), ExecutionState()
    for s in (s1, s2):
        execute_step(lattice, g, s, "final", MatchOptions(limit=4))
        propagate_pruning(lattice, s)
    import json
    assert json.dumps(state_to_json(lattice, s1), sort_keys=True) == \
        json.dumps(state_to_json(lattice, s2), sort_keys=True)
