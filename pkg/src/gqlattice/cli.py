"""Command-line front end for the query pipeline.

Exit codes: 0 success, 1 diagnostics (parse/validation failures or failed
fixture checks), 2 I/O or usage errors. All outputs are deterministic for
identical inputs.
"""

from __future__ import annotations

import json
import sys

import click

from .dsl import parse_with_diagnostics
from .execute import (
    ExecutionState,
    NotExecutedError,
    UnknownStepError,
    execute_step,
    overview_from_artifact,
    propagate_pruning,
    state_json_text,
)
from .graph import GraphFormatError, load_graph_file
from .instantiate import (
    InstantiationError,
    LatticeCaps,
    build_lattice,
    lattice_json_text,
)
from .matcher import MatchOptions, MatchSetupError
from .translate import NotConcreteError, translate


class CliError(click.ClickException):
    exit_code = 2


def _read_query(path: str):
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    qr, diags = parse_with_diagnostics(text)
    for d in diags:
        where = f"{path}:{d.span}: " if d.span else f"{path}: "
        click.echo(f"{where}{d}", err=True)
    if qr is None:
        sys.exit(1)
    return qr


def _build(qr, caps: LatticeCaps = LatticeCaps()):
    try:
        return build_lattice(qr, caps)
    except InstantiationError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


def _load_graph(path: str):
    try:
        return load_graph_file(path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    except GraphFormatError as exc:
        click.echo(f"error: {path}: {exc}", err=True)
        sys.exit(1)


def _write_out(out: str | None, text: str):
    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        click.echo(text, nl=False)


@click.group()
def main():
    """Graph-query engine: validate, instantiate, translate, execute."""


@main.command()
@click.argument("query_file")
def validate(query_file):
    """Parse and validate a query file; report diagnostics."""
    _read_query(query_file)
    click.echo("ok")


@main.command()
@click.argument("query_file")
@click.option("--out", default=None, help="Write the lattice artifact to a file.")
@click.option("--max-instances", default=2000, show_default=True)
@click.option("--max-pattern-nodes", default=200, show_default=True)
def instantiate(query_file, out, max_instances, max_pattern_nodes):
    """Build the instantiation lattice for a query."""
    qr = _read_query(query_file)
    lattice = _build(qr, LatticeCaps(max_instances, max_pattern_nodes))
    _write_out(out, lattice_json_text(lattice))
    if out:
        layers = ", ".join(str(len(layer)) for layer in lattice.layers) or "none"
        click.echo(f"lattice written to {out} (layers: {layers})")


@main.command(name="translate")
@click.argument("query_file")
@click.option("--instance", required=True, help="Instance id, e.g. fs-final or cell:r2:0.")
@click.option("--limit", default=None, type=int, help="LIMIT clause value.")
@click.option("--out", default=None, help="Write the query text to a .cypher file.")
def translate_cmd(query_file, instance, limit, out):
    """Translate one concrete instance into graph-query text."""
    qr = _read_query(query_file)
    lattice = _build(qr)
    inst = lattice.instance(instance)
    if inst is None:
        click.echo(f"error: unknown instance {instance!r}", err=True)
        sys.exit(1)
    try:
        translated = translate(inst.pattern, limit)
    except NotConcreteError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    _write_out(out, translated.text + "\n")


@main.command(name="exec")
@click.argument("query_file")
@click.option("--graph", "graph_file", required=True)
@click.option("--step", "steps", multiple=True, required=True,
              help="Step reference (repeatable): backbone, fs:<rule>, fs-final, "
                   "final, layer:<k>, cell:<r1~r2>, or an instance id.")
@click.option("--limit", default=100, show_default=True, type=int,
              help="Per-instance result limit.")
@click.option("--time-budget", default=None, type=float,
              help="Per-instance time budget in seconds.")
@click.option("--out", default=None, help="Write the results artifact to a file.")
def exec_cmd(query_file, graph_file, steps, limit, time_budget, out):
    """Execute lattice steps against a graph, with pruning propagation."""
    qr = _read_query(query_file)
    graph = _load_graph(graph_file)
    lattice = _build(qr)
    state = ExecutionState()
    opts = MatchOptions(limit=limit, time_budget=time_budget)
    for step in steps:
        try:
            execute_step(lattice, graph, state, step, opts)
        except UnknownStepError:
            click.echo(f"error: unknown step {step!r}", err=True)
            sys.exit(1)
        except MatchSetupError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
        propagate_pruning(lattice, state)
    for inst in lattice.all_instances():
        st = state.status(inst.id)
        if st.kind == "not-run":
            continue
        line = f"{inst.id}: {st.kind}"
        if st.kind == "found":
            line += f" count={st.count} complete={str(st.complete).lower()}"
        if st.cause:
            line += f" cause={st.cause}"
        click.echo(line)
    if out:
        _write_out(out, state_json_text(lattice, state))
        click.echo(f"results written to {out}")


@main.command()
@click.option("--results", "results_file", required=True)
@click.option("--select", required=True,
              help="Comma-separated instance ids to aggregate.")
def overview(results_file, select):
    """Frequency overview over selected instances of a results artifact."""
    try:
        with open(results_file, encoding="utf-8") as f:
            artifact = json.load(f)
    except OSError as exc:
        raise CliError(f"cannot read {results_file}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"malformed results artifact: {exc}") from exc
    ids = [s for s in select.split(",") if s]
    try:
        ov = overview_from_artifact(artifact, ids)
    except (UnknownStepError, NotExecutedError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(json.dumps(
        {"nodes": dict(sorted(ov.node_freq.items())),
         "edges": dict(sorted(ov.edge_freq.items())),
         "over": list(ov.over)},
        indent=2, sort_keys=True))


@main.command()
@click.argument("name", required=False)
def fixture(name):
    """Run a bundled fixture check (all fixtures when no name is given)."""
    from .fixtures import fixture_check, list_fixtures

    names = [name] if name else list_fixtures()
    failed = False
    for n in names:
        try:
            report = fixture_check(n)
        except FileNotFoundError as exc:
            raise CliError(str(exc)) from exc
        click.echo(str(report))
        failed = failed or not report.passed
    sys.exit(1 if failed else 0)


@main.command()
@click.option("--port", default=8420, show_default=True, envvar="GQLATTICE_PORT")
@click.option("--graph", "graph_file", default=None,
              help="Preload this graph into every new session.")
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(port, graph_file, host):
    """Run the HTTP service (REST API plus static UI when built)."""
    import uvicorn

    from .service import create_app

    preload = _load_graph(graph_file) if graph_file else None
    uvicorn.run(create_app(preload_graph=preload), host=host, port=port)


if __name__ == "__main__":
    main()
