import random

import pytest

from gqlattice.dsl import QdslParseError, parse, parse_with_diagnostics, serialize
from gqlattice.model import (
    ChainMode,
    EdgeAttrRule,
    MotifConfigRule,
    MotifKind,
    NodeAttrRule,
    Op,
    RepeatingRule,
    validate,
)
from genqr import random_representation

CASE2 = '''query "case2" {
  node n0;
  motif C0 = clique(nodes=5);
  edge e0 = n0 -- C0;
  rule attr node n0: name == "Valjean";
  rule repeat C0: count = 0..3;
}
'''


def test_parse_single_node_attr_rule():
    qr = parse('query "q" { node n0; rule attr node n0: name == "Valjean"; }')
    assert len(qr.entities) == 1
    assert len(qr.rules) == 1
    body = qr.rules[0].body
    assert isinstance(body, NodeAttrRule)
    assert body.predicate.attr == "name"
    assert body.predicate.op is Op.EQ
    assert body.predicate.literal == "Valjean"


def test_empty_input_gives_unnamed_with_warning():
    qr, diags = parse_with_diagnostics("   \n# just a comment\n")
    assert qr is not None
    assert qr.name == "unnamed"
    assert qr.entities == [] and qr.rules == []
    assert any(d.severity == "warning" for d in diags)


def test_undeclared_reference_has_span():
    with pytest.raises(QdslParseError) as err:
        parse('query "q" {\n  node n0;\n  edge e0 = n0 -> n1;\n}')
    diags = err.value.diagnostics
    assert len(diags) == 1
    assert "n1" in diags[0].message
    assert diags[0].span.line == 3
    assert diags[0].span.column == 19


def test_duplicate_declaration_rejected():
    with pytest.raises(QdslParseError) as err:
        parse('query "q" { node a; node a; }')
    assert "duplicate" in str(err.value)


def test_lexical_error_position():
    qr, diags = parse_with_diagnostics('query "q" { node €; }')
    assert qr is None
    assert diags[0].span is not None


def test_motif_declaration_desugars_to_config_rule():
    qr = parse('query "q" { motif T = tree(nodes=3..4, width=2, depth=1..3); }')
    assert len(qr.rules) == 1
    body = qr.rules[0].body
    assert isinstance(body, MotifConfigRule)
    assert (body.node_range.lo, body.node_range.hi) == (3, 4)
    assert (body.width_range.lo, body.width_range.hi) == (2, 2)
    assert (body.depth_range.lo, body.depth_range.hi) == (1, 3)
    ent = qr.entities[0]
    assert ent.kind is MotifKind.TREE


def test_parser_rejects_invalid_representation():
    # repeat twice on the same target passes the grammar but fails validation
    with pytest.raises(QdslParseError):
        parse('query "q" { node a; rule repeat a: count = 0..1; rule repeat a: count = 1..2; }')


def test_parse_case2_and_round_trip():
    qr = parse(CASE2)
    assert parse(serialize(qr)) == qr
    assert [r for r in qr.rules if isinstance(r.body, RepeatingRule)]


def test_round_trip_all_rule_kinds():
    text = '''query "all" {
  node a;
  node b;
  motif P = path(nodes=2..4);
  motif T = tree(nodes=3, width=1..2, depth=2);
  edge e0 = a -> P.head;
  edge e1 = P.tail -> b;
  group G = { a, b, e0 };
  rule attr node a: label == "heist";
  rule attr nodes in T: score >= 0.5;
  rule attr edge e1: value > 100;
  rule attr edges in G: value != -3;
  rule repeat b: count = 0..2;
  rule chain a: start=a, end=a, iterations=1..2, mode=linked;
}
'''
    qr = parse(text)
    assert parse(serialize(qr)) == qr
    kinds = {type(r.body).__name__ for r in qr.rules}
    assert kinds == {"NodeAttrRule", "EdgeAttrRule", "MotifConfigRule",
                     "RepeatingRule", "ChainingRule"}


def test_empty_representation_serialization():
    qr, _ = parse_with_diagnostics("")
    assert serialize(qr) == 'query "unnamed" { }\n'
    assert parse(serialize(qr)) == qr


def test_string_escapes_round_trip():
    qr = parse(r'query "q" { node a; rule attr node a: name == "va\"l\\j\nx"; }')
    assert qr.rules[0].body.predicate.literal == 'va"l\\j\nx'
    assert parse(serialize(qr)) == qr


def test_quoted_attribute_name():
    qr = parse('query "q" { node a; rule attr node a: "weird attr" == 1; }')
    assert qr.rules[0].body.predicate.attr == "weird attr"
    assert parse(serialize(qr)) == qr


def test_negative_and_float_literals():
    qr = parse('query "q" { node a; rule attr node a: x > -1.5; rule attr node a: y <= 3; }')
    assert qr.rules[0].body.predicate.literal == -1.5
    assert qr.rules[1].body.predicate.literal == 3
    assert parse(serialize(qr)) == qr


def test_shared_chain_mode_parses():
    qr = parse('query "q" { node a; node b; group G = { a, b }; '
               'rule chain G: start=a, end=b, iterations=0..2, mode=shared; }')
    assert qr.rules[0].body.mode is ChainMode.SHARED


def test_range_without_dots_is_fixed():
    qr = parse('query "q" { node a; rule repeat a: count = 2; }')
    rng = qr.rules[0].body.count_range
    assert (rng.lo, rng.hi) == (2, 2)


def test_error_recovery_collects_multiple_diagnostics():
    text = 'query "q" {\n  node a;;\n  rule repeat ghost: count = 1;\n}'
    qr, diags = parse_with_diagnostics(text)
    assert qr is None
    assert len([d for d in diags if d.severity == "error"]) >= 2


def test_edges_in_requires_scope_entity():
    qr, diags = parse_with_diagnostics(
        'query "q" { node a; rule attr nodes in a: x == 1; }')
    assert qr is None
    assert any("motif or group" in d.message for d in diags)


def test_random_round_trip_small():
    rng = random.Random(42)
    for i in range(150):
        qr = random_representation(rng)
        assert not [d for d in validate(qr) if d.severity == "error"], f"case {i}"
        text = serialize(qr)
        back = parse(text)
        assert back == qr, f"case {i}:\n{text}"
