import json

import pytest

from gqlattice.fixtures import FixtureReport, fixture_check, fixture_dir, list_fixtures


def test_all_fixtures_present():
    assert list_fixtures() == [
        "lmcn-case2-unconstrained",
        "lmcn-case2-value-gt-1",
        "synthetic-mln-chain",
    ]


def test_unknown_fixture_is_actionable():
    with pytest.raises(FileNotFoundError) as err:
        fixture_dir("nope")
    assert "available" in str(err.value)


def test_lmcn_case2_unconstrained():
    report = fixture_check("lmcn-case2-unconstrained")
    assert report.passed, str(report)
    assert report.checked == 4
    assert set(report.statuses.values()) == {"found"}


def test_lmcn_case2_value_gt_1():
    # engine-derived truth: the public co-occurrence data contains four
    # vertex-disjoint strong-tie communities around the protagonist, so every
    # repeat count has matches (see expected.json notes)
    report = fixture_check("lmcn-case2-value-gt-1")
    assert report.passed, str(report)
    assert set(report.statuses.values()) == {"found"}


def test_value_gt_1_four_packing_exists_by_direct_check():
    """Matcher-independent proof that the four-community strong-tie pattern
    has a match: four vertex-disjoint 5-cliques, every internal pair tied
    with value > 1, each clique containing a neighbor of Valjean. This is the
    fact that makes the curated 'empty' expectation in the acceptance suite
    unattainable on this dataset."""
    import itertools

    with open(fixture_dir("lmcn-case2-value-gt-1") / "graph.json", encoding="utf-8") as f:
        doc = json.load(f)
    value = {}
    neighbors = {}
    for e in doc["edges"]:
        a, b = e["source"], e["target"]
        value[frozenset((a, b))] = e["attrs"]["value"]
        neighbors.setdefault(a, set()).add(b)
        neighbors.setdefault(b, set()).add(a)

    cliques = [
        ["Bossuet", "Bahorel", "Combeferre", "Feuilly", "Prouvaire"],
        ["Enjolras", "Courfeyrac", "Gavroche", "Joly", "Marius"],
        ["Fantine", "Blacheville", "Dahlia", "Fameuil", "Favourite"],
        ["Brevet", "Champmathieu", "Chenildieu", "Cochepaille", "Judge"],
    ]
    all_members = [m for c in cliques for m in c]
    assert len(set(all_members)) == 20  # vertex-disjoint
    assert "Valjean" not in all_members
    for clique in cliques:
        # the first member plays the representative attached to Valjean
        assert clique[0] in neighbors["Valjean"]
        for u, v in itertools.combinations(clique, 2):
            assert value.get(frozenset((u, v)), 0) > 1, (u, v)


def test_synthetic_mln_chain_half_empty():
    report = fixture_check("synthetic-mln-chain")
    assert report.passed, str(report)
    assert report.checked == 16
    kinds = list(report.statuses.values())
    assert kinds.count("found") == 8
    assert kinds.count("empty") == 8


def test_mln_chain_empties_follow_repeat_axis():
    d = fixture_dir("synthetic-mln-chain")
    with open(d / "expected.json", encoding="utf-8") as f:
        expected = json.load(f)
    for exp in expected["expectations"]:
        repeat = next(c["count"] for c in exp["assignment"].values() if "count" in c)
        want = "found" if repeat <= 1 else "empty"
        assert exp["status"] == want


def test_expectations_carry_provenance():
    for name in list_fixtures():
        with open(fixture_dir(name) / "expected.json", encoding="utf-8") as f:
            expected = json.load(f)
        assert all(e.get("provenance") for e in expected["expectations"])
