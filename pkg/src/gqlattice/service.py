"""HTTP service exposing the pipeline to scripts and the companion UI.

Sessions are in-memory with idle eviction. Within a session, query mutation
rebuilds the lattice and discards execution state; step references from a
previous lattice answer 409. Execute requests are serialized per session.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .dsl import parse_with_diagnostics
from .execute import (
    ExecutionState,
    NotExecutedError,
    UnknownStepError,
    aggregate,
    execute_step,
    propagate_pruning,
    state_to_json,
)
from .graph import GraphFormatError, PropertyGraph, load_graph
from .instantiate import (
    InstantiationLattice,
    LatticeCaps,
    LatticeSizeError,
    build_lattice,
    lattice_to_json,
)
from .matcher import MatchOptions, MatchSetupError
from .model import qr_from_json
from .translate import NotConcreteError, translate

SESSION_IDLE_SECONDS = 30 * 60


@dataclass
class Session:
    id: str
    graph: PropertyGraph | None = None
    lattice: InstantiationLattice | None = None
    state: ExecutionState = field(default_factory=ExecutionState)
    prior_ids: set[str] = field(default_factory=set)
    last_access: float = field(default_factory=time.time)
    lock: threading.Lock = field(default_factory=threading.Lock)


def _diag_json(d) -> dict:
    out = {"severity": d.severity, "message": d.message}
    if d.subject:
        out["subject"] = d.subject
    if d.span is not None:
        out["line"] = d.span.line
        out["column"] = d.span.column
        out["length"] = d.span.length
    return out


def _lattice_summary(lattice: InstantiationLattice) -> dict:
    return {
        "query": lattice.qr.name,
        "directed": lattice.directed,
        "fullySpecifiedRules": list(lattice.fully_specified),
        "underspecifiedRules": list(lattice.underspecified),
        "previews": [p.id for p in lattice.fs_previews],
        "layers": [
            [{"id": c.id, "ruleSet": list(c.rule_set), "instances": len(c.instances)}
             for c in layer]
            for layer in lattice.layers
        ],
        "instanceCount": len(lattice.all_instances()),
        "suggestedOrder": lattice.suggested_order(),
    }


def create_app(preload_graph: PropertyGraph | None = None,
               caps: LatticeCaps = LatticeCaps(),
               idle_seconds: float = SESSION_IDLE_SECONDS) -> FastAPI:
    app = FastAPI(title="gqlattice", docs_url=None, redoc_url=None)
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()

    def evict_idle():
        now = time.time()
        for sid in [s for s, sess in sessions.items()
                    if now - sess.last_access > idle_seconds]:
            sessions.pop(sid, None)

    def get_session(sid: str) -> Session | None:
        with registry_lock:
            evict_idle()
            sess = sessions.get(sid)
            if sess:
                sess.last_access = time.time()
            return sess

    def error(status: int, message: str, **extra) -> JSONResponse:
        return JSONResponse({"error": message, **extra}, status_code=status)

    @app.post("/api/session")
    def create_session():
        sid = uuid.uuid4().hex
        with registry_lock:
            evict_idle()
            sessions[sid] = Session(sid, graph=preload_graph)
        return {"session": sid}

    @app.post("/api/session/{sid}/graph")
    async def put_graph(sid: str, request: Request):
        sess = get_session(sid)
        if sess is None:
            return error(404, "unknown session")
        try:
            doc = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            return error(400, f"malformed JSON: {exc}")
        try:
            graph = load_graph(doc)
        except GraphFormatError as exc:
            return error(400, str(exc))
        with sess.lock:
            sess.graph = graph
            sess.state = ExecutionState()  # results against the old graph are stale
        return {
            "directed": graph.directed,
            "nodes": len(graph.nodes),
            "edges": len(graph.edges),
        }

    @app.put("/api/session/{sid}/query")
    async def put_query(sid: str, request: Request):
        sess = get_session(sid)
        if sess is None:
            return error(404, "unknown session")
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            return error(400, f"malformed JSON: {exc}")
        diags: list = []
        if "dsl" in body:
            qr, diags = parse_with_diagnostics(str(body["dsl"]))
            if qr is None:
                return error(400, "query has errors",
                             diagnostics=[_diag_json(d) for d in diags])
        elif "representation" in body:
            try:
                qr = qr_from_json(body["representation"])
            except (ValueError, KeyError, TypeError) as exc:
                return error(400, f"bad representation: {exc}")
            from .model import validate as validate_qr

            diags = validate_qr(qr)
            if any(d.severity == "error" for d in diags):
                return error(400, "query has errors",
                             diagnostics=[_diag_json(d) for d in diags])
        else:
            return error(400, "body must carry 'dsl' or 'representation'")
        try:
            lattice = build_lattice(qr, caps)
        except LatticeSizeError as exc:
            return error(422, str(exc), cell=exc.cell, count=exc.count)
        except Exception as exc:  # instantiation errors surface as validation
            return error(400, str(exc))
        with sess.lock:
            if sess.lattice is not None:
                sess.prior_ids = {i.id for i in sess.lattice.all_instances()}
                sess.prior_ids.update(c.id for layer in sess.lattice.layers for c in layer)
                sess.prior_ids.update(sess.lattice.suggested_order())
            sess.lattice = lattice
            sess.state = ExecutionState()
        return {
            "diagnostics": [_diag_json(d) for d in diags],
            "lattice": _lattice_summary(lattice),
        }

    @app.get("/api/session/{sid}/lattice")
    def get_lattice(sid: str):
        sess = get_session(sid)
        if sess is None:
            return error(404, "unknown session")
        if sess.lattice is None:
            return error(404, "no query loaded")
        return lattice_to_json(sess.lattice)

    @app.post("/api/session/{sid}/execute")
    async def post_execute(sid: str, request: Request):
        sess = get_session(sid)
        if sess is None:
            return error(404, "unknown session")
        if sess.lattice is None:
            return error(404, "no query loaded")
        if sess.graph is None:
            return error(404, "no graph loaded")
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            return error(400, f"malformed JSON: {exc}")
        step = body.get("step")
        if not isinstance(step, str):
            return error(400, "body must carry a 'step' reference")
        limit = body.get("limit", 100)
        if not (isinstance(limit, int) and limit >= 1):
            return error(400, "limit must be a positive integer")
        budget = body.get("timeBudget")
        opts = MatchOptions(limit=limit,
                            time_budget=float(budget) if budget is not None else None)
        with sess.lock:
            try:
                execute_step(sess.lattice, sess.graph, sess.state, step, opts)
            except UnknownStepError:
                if step in sess.prior_ids:
                    return error(409, f"step {step!r} refers to a stale lattice")
                return error(404, f"unknown step {step!r}")
            except MatchSetupError as exc:
                return error(400, str(exc))
            propagate_pruning(sess.lattice, sess.state)
            payload = state_to_json(sess.lattice, sess.state)
        return {"statuses": payload["statuses"], "steps": payload["steps"]}

    @app.get("/api/session/{sid}/results/{instance_id}")
    def get_results(sid: str, instance_id: str):
        sess = get_session(sid)
        if sess is None:
            return error(404, "unknown session")
        if sess.lattice is None:
            return error(404, "no query loaded")
        inst = sess.lattice.instance(instance_id)
        if inst is None:
            if instance_id in sess.prior_ids:
                return error(409, f"instance {instance_id!r} refers to a stale lattice")
            return error(404, f"unknown instance {instance_id!r}")
        st = sess.state.status(instance_id)
        results = [
            {"nodes": dict(sorted(r.node_map.items())),
             "edges": dict(sorted(r.edge_map.items()))}
            for r in sess.state.results.get(instance_id, [])
        ]
        return {
            "instance": instance_id,
            "status": st.kind,
            "count": st.count,
            "complete": st.complete,
            "cause": st.cause,
            "assignment": {rid: dict(sorted(c.items()))
                           for rid, c in sorted(inst.assignment.items())},
            "embeddings": results,
        }

    @app.get("/api/session/{sid}/overview")
    def get_overview(sid: str, instances: str = ""):
        sess = get_session(sid)
        if sess is None:
            return error(404, "unknown session")
        if sess.lattice is None:
            return error(404, "no query loaded")
        ids = [s for s in instances.split(",") if s]
        for iid in ids:
            if sess.lattice.instance(iid) is None:
                if iid in sess.prior_ids:
                    return error(409, f"instance {iid!r} refers to a stale lattice")
                return error(404, f"unknown instance {iid!r}")
        try:
            ov = aggregate(sess.state, ids)
        except NotExecutedError as exc:
            return error(400, str(exc))
        return {
            "nodes": dict(sorted(ov.node_freq.items())),
            "edges": dict(sorted(ov.edge_freq.items())),
            "over": list(ov.over),
        }

    @app.get("/api/session/{sid}/translate/{instance_id}")
    def get_translate(sid: str, instance_id: str, limit: int | None = None):
        sess = get_session(sid)
        if sess is None:
            return error(404, "unknown session")
        if sess.lattice is None:
            return error(404, "no query loaded")
        inst = sess.lattice.instance(instance_id)
        if inst is None:
            if instance_id in sess.prior_ids:
                return error(409, f"instance {instance_id!r} refers to a stale lattice")
            return error(404, f"unknown instance {instance_id!r}")
        try:
            translated = translate(inst.pattern, limit)
        except NotConcreteError as exc:
            return error(400, str(exc))
        return {"instance": instance_id, "text": translated.text,
                "varMap": translated.var_map}

    ui_dir = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if ui_dir.is_dir():
        # mounted last so /api routes keep precedence
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
