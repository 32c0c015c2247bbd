import json

import pytest
from fastapi.testclient import TestClient

from gqlattice.service import create_app
from conftest import FIXTURES

MLN = FIXTURES / "synthetic-mln-chain"


@pytest.fixture()
def client():
    return TestClient(create_app())


def make_session(client, graph=True, query=True):
    sid = client.post("/api/session").json()["session"]
    if graph:
        doc = json.loads((MLN / "graph.json").read_text())
        assert client.post(f"/api/session/{sid}/graph", content=json.dumps(doc)).status_code == 200
    if query:
        q = (MLN / "query.gq").read_text()
        r = client.put(f"/api/session/{sid}/query", content=json.dumps({"dsl": q}))
        assert r.status_code == 200
    return sid


def test_full_flow(client):
    sid = make_session(client)
    lattice = client.get(f"/api/session/{sid}/lattice").json()
    assert lattice["query"] == "mln-chain"
    assert [len(layer) for layer in lattice["layers"]] == [2, 1]

    r = client.post(f"/api/session/{sid}/execute",
                    content=json.dumps({"step": "final", "limit": 2}))
    assert r.status_code == 200
    statuses = r.json()["statuses"]
    final_ids = [i["id"] for i in lattice["layers"][-1][0]["instances"]]
    kinds = [statuses[i]["status"] for i in final_ids]
    assert kinds.count("found") == 8 and kinds.count("empty") == 8

    found = [i for i in final_ids if statuses[i]["status"] == "found"]
    r = client.get(f"/api/session/{sid}/results/{found[0]}")
    assert r.status_code == 200
    body = r.json()
    assert body["status"] == "found"
    assert len(body["embeddings"]) == body["count"] == 2

    r = client.get(f"/api/session/{sid}/overview?instances={','.join(found[:2])}")
    assert r.status_code == 200
    assert r.json()["nodes"]

    r = client.get(f"/api/session/{sid}/translate/{found[0]}?limit=3")
    assert r.status_code == 200
    assert r.json()["text"].startswith("MATCH ")
    assert r.json()["text"].endswith("LIMIT 3")


def test_validation_errors_are_400_with_rule_ids(client):
    sid = make_session(client, query=False)
    bad = 'query "b" { node a; rule repeat a: count = 0..1; rule repeat a: count = 0..2; }'
    r = client.put(f"/api/session/{sid}/query", content=json.dumps({"dsl": bad}))
    assert r.status_code == 400
    diags = r.json()["diagnostics"]
    assert any("repeat/chain" in d["message"] for d in diags)


def test_representation_body_accepted(client):
    sid = make_session(client, query=False)
    rep = {"name": "q", "entities": [{"kind": "node", "id": "a"}],
           "rules": [{"id": "r0", "target": "a",
                      "body": {"kind": "repeat", "count": [0, 2]}}]}
    r = client.put(f"/api/session/{sid}/query",
                   content=json.dumps({"representation": rep}))
    assert r.status_code == 200
    assert r.json()["lattice"]["layers"] == [[{"id": "cell:r0", "ruleSet": ["r0"],
                                               "instances": 3}]]


def test_cap_exceeded_is_422(client):
    sid = make_session(client, query=False)
    r = client.put(f"/api/session/{sid}/query", content=json.dumps(
        {"dsl": 'query "big" { node a; rule repeat a: count = 0..5000; }'}))
    assert r.status_code == 422
    assert r.json()["cell"]


def test_unknown_ids_are_404(client):
    assert client.get("/api/session/missing/lattice").status_code == 404
    sid = make_session(client)
    assert client.get(f"/api/session/{sid}/results/zzz").status_code == 404
    r = client.post(f"/api/session/{sid}/execute", content=json.dumps({"step": "zzz"}))
    assert r.status_code == 404


def test_stale_step_is_409(client):
    sid = make_session(client)
    lattice = client.get(f"/api/session/{sid}/lattice").json()
    old_instance = lattice["layers"][-1][0]["instances"][0]["id"]
    r = client.put(f"/api/session/{sid}/query",
                   content=json.dumps({"dsl": 'query "new" { node a; }'}))
    assert r.status_code == 200
    r = client.post(f"/api/session/{sid}/execute",
                    content=json.dumps({"step": old_instance}))
    assert r.status_code == 409
    assert client.get(f"/api/session/{sid}/results/{old_instance}").status_code == 409


def test_query_mutation_resets_execution_state(client):
    sid = make_session(client)
    client.post(f"/api/session/{sid}/execute",
                content=json.dumps({"step": "backbone", "limit": 1}))
    r = client.put(f"/api/session/{sid}/query", content=json.dumps(
        {"dsl": (MLN / "query.gq").read_text()}))
    assert r.status_code == 200
    lattice = client.get(f"/api/session/{sid}/lattice").json()
    backbone = lattice["backbone"]["id"]
    res = client.get(f"/api/session/{sid}/results/{backbone}")
    assert res.json()["status"] == "not-run"


def test_execute_before_graph_is_404(client):
    sid = client.post("/api/session").json()["session"]
    q = (MLN / "query.gq").read_text()
    client.put(f"/api/session/{sid}/query", content=json.dumps({"dsl": q}))
    r = client.post(f"/api/session/{sid}/execute", content=json.dumps({"step": "final"}))
    assert r.status_code == 404


def test_lattice_layer_sizes_three_rules(client):
    sid = make_session(client, query=False)
    q = '''query "three" {
      node a; node b; node c;
      rule repeat a: count = 0..1;
      rule repeat b: count = 0..1;
      rule repeat c: count = 0..1;
    }'''
    r = client.put(f"/api/session/{sid}/query", content=json.dumps({"dsl": q}))
    layers = r.json()["lattice"]["layers"]
    assert [len(layer) for layer in layers] == [3, 3, 1]


def test_idle_sessions_are_evicted():
    evicting = TestClient(create_app(idle_seconds=0.0))
    sid = evicting.post("/api/session").json()["session"]
    # the next registry access sweeps idle sessions
    evicting.post("/api/session")
    assert evicting.get(f"/api/session/{sid}/lattice").status_code == 404


def test_cli_and_service_produce_identical_lattices(client, tmp_path):
    from click.testing import CliRunner

    from gqlattice.cli import main as cli_main

    sid = make_session(client)
    service_lattice = client.get(f"/api/session/{sid}/lattice").json()
    out = tmp_path / "lattice.json"
    runner = CliRunner()
    r = runner.invoke(cli_main, ["instantiate", str(MLN / "query.gq"), "--out", str(out)])
    assert r.exit_code == 0
    cli_lattice = json.loads(out.read_text())
    assert json.dumps(cli_lattice, sort_keys=True) == json.dumps(service_lattice, sort_keys=True)


def test_overview_not_executed_is_400(client):
    sid = make_session(client)
    lattice = client.get(f"/api/session/{sid}/lattice").json()
    iid = lattice["layers"][-1][0]["instances"][0]["id"]
    r = client.get(f"/api/session/{sid}/overview?instances={iid}")
    assert r.status_code == 400
