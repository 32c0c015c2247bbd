import pytest

from gqlattice.model import (
    ChainingRule,
    ChainMode,
    CustomEntity,
    EdgeAttrRule,
    EdgeEntity,
    EntityRef,
    IntRange,
    MotifConfigRule,
    MotifEntity,
    MotifKind,
    NodeAttrRule,
    NodeEntity,
    Op,
    Predicate,
    QueryRepresentation,
    RepeatingRule,
    Rule,
    assignments,
    classify_rules,
    qr_from_json,
    qr_to_json,
    validate,
)


def errors(qr):
    return [d for d in validate(qr) if d.severity == "error"]


def make_case1_like():
    """Node with attr rule + path motif + chain-of-nodes structure."""
    return QueryRepresentation("case1", [
        NodeEntity("n0"),
        MotifEntity("P0", MotifKind.PATH),
        NodeEntity("n1"),
        NodeEntity("n2"),
        NodeEntity("n3"),
        EdgeEntity("e0", EntityRef("n0"), EntityRef("P0", "head"), True),
        EdgeEntity("e1", EntityRef("P0", "tail"), EntityRef("n1"), True),
        EdgeEntity("e2", EntityRef("n1"), EntityRef("n2"), True),
        EdgeEntity("e3", EntityRef("n1"), EntityRef("n3"), True),
        CustomEntity("C0", ("n1", "n2", "n3", "e2", "e3")),
    ], [
        Rule("r0", "P0", MotifConfigRule(IntRange(3, 3))),
        Rule("r1", "n0", NodeAttrRule(Predicate("label", Op.EQ, "heist"))),
        Rule("r2", "C0", EdgeAttrRule(Predicate("value", Op.GT, 0))),
        Rule("r3", "n1", RepeatingRule(IntRange(1, 2))),
        Rule("r4", "n3", RepeatingRule(IntRange(0, 2))),
    ])


def test_valid_representation_has_no_diagnostics():
    assert errors(make_case1_like()) == []


def test_motif_config_on_node_is_error():
    qr = QueryRepresentation("q", [NodeEntity("a")],
                             [Rule("r0", "a", MotifConfigRule(IntRange(3, 3)))])
    assert len(errors(qr)) >= 1


def test_two_repeats_on_same_node_is_error():
    qr = QueryRepresentation("q", [NodeEntity("a")], [
        Rule("r0", "a", RepeatingRule(IntRange(0, 1))),
        Rule("r1", "a", RepeatingRule(IntRange(0, 2))),
    ])
    assert len(errors(qr)) == 1


def test_motif_config_plus_repeat_on_same_motif_is_allowed():
    qr = QueryRepresentation("q", [
        NodeEntity("a"),
        MotifEntity("C0", MotifKind.CLIQUE),
        EdgeEntity("e0", EntityRef("a"), EntityRef("C0"), False),
    ], [
        Rule("r0", "C0", MotifConfigRule(IntRange(5, 5))),
        Rule("r1", "C0", RepeatingRule(IntRange(0, 3))),
    ])
    assert errors(qr) == []


def test_edge_endpoint_constraints():
    qr = QueryRepresentation("q", [
        NodeEntity("a"),
        CustomEntity("G", ("a",)),
        EdgeEntity("e0", EntityRef("a"), EntityRef("G"), False),
    ], [])
    assert any("may not reference" in d.message for d in errors(qr))

    qr = QueryRepresentation("q", [
        NodeEntity("a"),
        MotifEntity("P", MotifKind.PATH),
        EdgeEntity("e0", EntityRef("a"), EntityRef("P"), False),
    ], [Rule("r0", "P", MotifConfigRule(IntRange(2, 3)))])
    assert any("head or tail" in d.message for d in errors(qr))

    qr = QueryRepresentation("q", [
        NodeEntity("a"),
        MotifEntity("C", MotifKind.CLIQUE),
        EdgeEntity("e0", EntityRef("a"), EntityRef("C", "head"), False),
    ], [Rule("r0", "C", MotifConfigRule(IntRange(2, 3)))])
    assert any("only valid on path motifs" in d.message for d in errors(qr))


def test_nested_group_is_error():
    qr = QueryRepresentation("q", [
        NodeEntity("a"),
        CustomEntity("G1", ("a",)),
        CustomEntity("G2", ("G1",)),
    ], [])
    assert any("nested" in d.message for d in errors(qr))


def test_ordering_predicate_needs_numeric_literal():
    qr = QueryRepresentation("q", [NodeEntity("a")], [
        Rule("r0", "a", NodeAttrRule(Predicate("name", Op.LT, "x"))),
    ])
    assert len(errors(qr)) == 1
    qr = QueryRepresentation("q", [NodeEntity("a")], [
        Rule("r0", "a", NodeAttrRule(Predicate("flag", Op.GE, True))),
    ])
    assert len(errors(qr)) == 1


def test_motif_needs_exactly_one_config():
    qr = QueryRepresentation("q", [MotifEntity("C", MotifKind.CLIQUE)], [])
    assert any("no configuration" in d.message for d in errors(qr))
    qr = QueryRepresentation("q", [MotifEntity("C", MotifKind.CLIQUE)], [
        Rule("r0", "C", MotifConfigRule(IntRange(2, 2))),
        Rule("r1", "C", MotifConfigRule(IntRange(3, 3))),
    ])
    assert any("multiple configuration" in d.message for d in errors(qr))


def test_motif_minimum_sizes():
    for kind, minimum in [(MotifKind.PATH, 2), (MotifKind.LOOP, 3),
                          (MotifKind.TREE, 2), (MotifKind.CLIQUE, 2)]:
        qr = QueryRepresentation("q", [MotifEntity("M", kind)], [
            Rule("r0", "M", MotifConfigRule(IntRange(minimum - 1, minimum))),
        ])
        assert errors(qr), kind
        qr = QueryRepresentation("q", [MotifEntity("M", kind)], [
            Rule("r0", "M", MotifConfigRule(IntRange(minimum, minimum))),
        ])
        assert not errors(qr), kind


def test_width_depth_only_for_trees():
    qr = QueryRepresentation("q", [MotifEntity("C", MotifKind.CLIQUE)], [
        Rule("r0", "C", MotifConfigRule(IntRange(3, 3), width_range=IntRange(1, 2))),
    ])
    assert any("only valid for tree" in d.message for d in errors(qr))


def test_chaining_validation():
    # node target: start/end must be the node itself
    qr = QueryRepresentation("q", [NodeEntity("a"), NodeEntity("b")], [
        Rule("r0", "a", ChainingRule("b", "b", IntRange(1, 2), ChainMode.LINKED)),
    ])
    assert errors(qr)
    # shared-node chain of a lone node degenerates: warning, not error
    qr = QueryRepresentation("q", [NodeEntity("a")], [
        Rule("r0", "a", ChainingRule("a", "a", IntRange(1, 2), ChainMode.SHARED)),
    ])
    assert not errors(qr)
    assert any(d.severity == "warning" for d in validate(qr))
    # shared-node with start == end on a multi-node group is an error
    qr = QueryRepresentation("q", [
        NodeEntity("a"), NodeEntity("b"), CustomEntity("G", ("a", "b")),
    ], [
        Rule("r0", "G", ChainingRule("a", "a", IntRange(1, 2), ChainMode.SHARED)),
    ])
    assert errors(qr)
    # start/end must be node members of the group
    qr = QueryRepresentation("q", [
        NodeEntity("a"), NodeEntity("b"), CustomEntity("G", ("a",)),
    ], [
        Rule("r0", "G", ChainingRule("a", "b", IntRange(0, 1), ChainMode.LINKED)),
    ])
    assert errors(qr)


def test_classify_rules():
    qr = make_case1_like()
    fully, under = classify_rules(qr)
    assert fully == ["r0"]  # path fixed at 3 nodes
    assert under == ["r3", "r4"]
    structural = [r for r in qr.rules if r.is_structural()]
    assert len(fully) + len(under) == len(structural)


def test_classify_fixed_repeat():
    qr = QueryRepresentation("q", [NodeEntity("a")],
                             [Rule("r0", "a", RepeatingRule(IntRange(2, 2)))])
    assert classify_rules(qr) == (["r0"], [])


def test_classify_attribute_rules_in_neither_list():
    qr = QueryRepresentation("q", [NodeEntity("a")], [
        Rule("r0", "a", NodeAttrRule(Predicate("x", Op.EQ, 1))),
    ])
    assert classify_rules(qr) == ([], [])


def test_assignments_repeating():
    r = Rule("r0", "a", RepeatingRule(IntRange(0, 3)))
    assert assignments(r) == [{"count": 0}, {"count": 1}, {"count": 2}, {"count": 3}]


def test_assignments_clique_range():
    r = Rule("r0", "C", MotifConfigRule(IntRange(4, 6)))
    assert assignments(r) == [{"nodes": 4}, {"nodes": 5}, {"nodes": 6}]


def test_assignments_tree_product_order():
    r = Rule("r0", "T", MotifConfigRule(IntRange(3, 3), depth_range=IntRange(2, 3)))
    assert assignments(r) == [{"nodes": 3, "depth": 2}, {"nodes": 3, "depth": 3}]


def test_assignments_length_is_range_product():
    r = Rule("r0", "T", MotifConfigRule(IntRange(3, 5), IntRange(1, 2), IntRange(2, 4)))
    assert len(assignments(r)) == 3 * 2 * 3


def test_predicate_type_mismatch_is_not_satisfied():
    assert not Predicate("x", Op.EQ, 1).matches({"x": "1"})
    assert not Predicate("x", Op.EQ, True).matches({"x": 1})
    assert not Predicate("x", Op.EQ, 1).matches({"x": True})
    assert not Predicate("x", Op.GT, 1).matches({"x": "zzz"})
    assert not Predicate("x", Op.EQ, 1).matches({})
    assert Predicate("x", Op.EQ, 1).matches({"x": 1.0})
    assert Predicate("x", Op.NE, "a").matches({"x": "b"})
    assert Predicate("x", Op.GE, 2).matches({"x": 2})


def test_json_codec_round_trip():
    qr = make_case1_like()
    assert qr_from_json(qr_to_json(qr)) == qr


def test_duplicate_entity_id_errors():
    qr = QueryRepresentation("q", [NodeEntity("a"), NodeEntity("a")], [])
    assert errors(qr)


def test_rule_on_undeclared_target():
    qr = QueryRepresentation("q", [], [Rule("r0", "ghost", RepeatingRule(IntRange(0, 1)))])
    assert errors(qr)


def test_attr_rule_kind_constraints():
    qr = QueryRepresentation("q", [
        NodeEntity("a"), NodeEntity("b"),
        EdgeEntity("e", EntityRef("a"), EntityRef("b"), False),
    ], [
        Rule("r0", "e", NodeAttrRule(Predicate("x", Op.EQ, 1))),
        Rule("r1", "a", EdgeAttrRule(Predicate("x", Op.EQ, 1))),
    ])
    assert len(errors(qr)) == 2
