"""Bundled datasets and scripted scenario checks.

Each fixture directory holds graph.json, query.gq, and expected.json. The
expectation table records, per final-layer instance, the Empty/Found status a
pipeline run must reproduce; every entry carries a provenance tag
("constructed" = guaranteed by how the synthetic graph was built, "derived" =
regenerated by running this engine on the bundled data).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..dsl import parse
from ..execute import ExecutionState, execute_step, propagate_pruning
from ..graph import load_graph
from ..instantiate import build_lattice
from ..matcher import MatchOptions

_ROOT = Path(__file__).parent


def list_fixtures() -> list[str]:
    return sorted(p.name for p in _ROOT.iterdir()
                  if p.is_dir() and (p / "expected.json").exists())


def fixture_dir(name: str) -> Path:
    d = _ROOT / name
    if not d.is_dir():
        raise FileNotFoundError(
            f"unknown fixture {name!r}; available: {', '.join(list_fixtures())}")
    return d


@dataclass
class FixtureReport:
    name: str
    checked: int = 0
    failures: list[str] = field(default_factory=list)
    statuses: dict[str, str] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def __str__(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        lines = [f"[{verdict}] {self.name}: {self.checked} expectations"]
        lines.extend(f"  mismatch: {f}" for f in self.failures)
        return "\n".join(lines)


def fixture_check(name: str) -> FixtureReport:
    """Run the fixture's scripted pipeline and diff statuses against its
    expectation table."""
    d = fixture_dir(name)
    graph_path = d / "graph.json"
    if not graph_path.exists():
        raise FileNotFoundError(
            f"fixture {name!r} is missing graph.json; regenerate it with "
            f"`python -m gqlattice.fixtures._generate`")
    with open(graph_path, encoding="utf-8") as f:
        graph = load_graph(json.load(f))
    qr = parse((d / "query.gq").read_text(encoding="utf-8"))
    with open(d / "expected.json", encoding="utf-8") as f:
        expected = json.load(f)

    lattice = build_lattice(qr)
    state = ExecutionState()
    opts = MatchOptions(limit=expected.get("limit", 1))
    execute_step(lattice, graph, state, expected.get("step", "final"), opts)
    propagate_pruning(lattice, state)

    report = FixtureReport(name)
    for exp in expected["expectations"]:
        iid = exp["instance"]
        want = exp["status"]
        got = state.status(iid).kind
        report.checked += 1
        report.statuses[iid] = got
        if got != want:
            report.failures.append(f"{iid}: expected {want}, got {got}")
    return report
