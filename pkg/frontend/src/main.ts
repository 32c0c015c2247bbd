// Panel wiring: one session store, server responses flow in, selections stay
// local. The editor emits DSL; applying it rebuilds the lattice server-side.

import { ApiError, Client } from "./api.js";
import { el, clear } from "./dom.js";
import { Editor } from "./editor.js";
import { RuleList } from "./rulelist.js";
import { LatticeView } from "./latticeview.js";
import { OverviewPanel, ResultList } from "./results.js";
import { emptySession, findInstance, relatedEntities } from "./state.js";
import type { GraphDocument } from "./types.js";

const client = new Client();
const state = emptySession();

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

async function main() {
  state.sessionId = await client.createSession();

  const dslBox = byId("dsl-text") as HTMLTextAreaElement;
  const diagBox = byId("diagnostics");
  const statusLine = byId("status-line");

  const ruleList = new RuleList(byId("rule-list"), {
    onHover: (id) => setHover(id),
    onRemoveRule: (index) => editor.removeRule(index),
    onEditRule: (index) => {
      const rule = editor.model.rules[index];
      if (rule.kind === "repeat") {
        const raw = window.prompt("count (lo..hi)", `${rule.count.lo}..${rule.count.hi}`) ?? "";
        const m = raw.match(/^(\d+)(?:\.\.(\d+))?$/);
        if (m) rule.count = { lo: +m[1], hi: m[2] ? +m[2] : +m[1] };
      } else if (rule.kind === "attr") {
        rule.literal = window.prompt("literal", String(rule.literal)) ?? rule.literal;
        const num = Number(rule.literal);
        if (typeof rule.literal === "string" && rule.literal !== "" && !Number.isNaN(num)) {
          rule.literal = num;
        }
      }
      editor.refresh();
    },
  });

  const editor = new Editor(byId("editor"), {
    onModelChange: (model, dsl) => {
      dslBox.value = dsl;
      ruleList.update(model);
    },
    onHover: (id) => setHover(id),
  });

  function setHover(id: string | null) {
    state.hoveredEntity = id;
    const related = id
      ? relatedEntities(editor.model.entities.map((e) => ({
          kind: e.kind,
          id: e.id,
          source: e.kind === "edge" ? { entity: e.source } : undefined,
          target: e.kind === "edge" ? { entity: e.target } : undefined,
          members: e.kind === "group" ? e.members : undefined,
        })), id)
      : new Set<string>();
    editor.setHighlight(related);
    ruleList.setHighlight(related);
  }

  const overviewPanel = new OverviewPanel(byId("overview"));
  const resultList = new ResultList(byId("result-list"));

  const latticeView = new LatticeView(byId("lattice"), byId("instance-detail"), {
    onSelectInstance: async (id) => {
      state.selectedInstance = id;
      render();
      if (!state.lattice || !state.sessionId) return;
      const status = state.statuses[id];
      if (status?.status === "found") {
        const payload = await client.results(state.sessionId, id);
        resultList.update(payload, findInstance(state.lattice, id)?.pattern ?? null);
        const overview = await client.overview(state.sessionId, [id]);
        overviewPanel.update(state.graph, overview);
      }
      try {
        const t = await client.translate(state.sessionId, id);
        byId("translated").textContent = t.text;
      } catch (err) {
        byId("translated").textContent = err instanceof ApiError ? `(${err.message})` : "";
      }
    },
    onRunStep: (ref) => runStep(ref),
  });

  async function runStep(ref: string) {
    if (!state.sessionId) return;
    const limit = parseInt((byId("limit-input") as HTMLInputElement).value, 10) || 100;
    statusLine.textContent = `running ${ref}...`;
    try {
      const out = await client.execute(state.sessionId, ref, limit);
      state.statuses = out.statuses;
      statusLine.textContent = `ran ${ref}`;
    } catch (err) {
      statusLine.textContent = err instanceof ApiError ? `error: ${err.message}` : String(err);
    }
    render();
  }

  byId("apply-query").addEventListener("click", async () => {
    if (!state.sessionId) return;
    clear(diagBox);
    try {
      const out = await client.putQuery(state.sessionId, dslBox.value);
      state.summary = out.lattice;
      state.diagnostics = out.diagnostics;
      state.lattice = await client.lattice(state.sessionId);
      state.statuses = {};
      state.selectedInstance = null;
      statusLine.textContent =
        `lattice: ${out.lattice.instanceCount} instances, layers ` +
        (out.lattice.layers.map((l) => l.length).join("/") || "none");
    } catch (err) {
      if (err instanceof ApiError) {
        state.diagnostics = err.diagnostics.length
          ? err.diagnostics
          : [{ severity: "error", message: err.message }];
        statusLine.textContent = `error: ${err.message}`;
      }
    }
    renderDiagnostics();
    render();
  });

  byId("graph-file").addEventListener("change", async (ev) => {
    const input = ev.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file || !state.sessionId) return;
    const doc = JSON.parse(await file.text()) as GraphDocument;
    const info = await client.loadGraph(state.sessionId, doc);
    state.graph = doc;
    state.statuses = {};
    statusLine.textContent = `graph loaded: ${info.nodes} nodes, ${info.edges} edges, ` +
      (info.directed ? "directed" : "undirected");
    render();
  });

  function renderDiagnostics() {
    clear(diagBox);
    for (const d of state.diagnostics) {
      const where = d.line !== undefined ? ` @${d.line}:${d.column}` : "";
      diagBox.append(el("div", { class: `diag ${d.severity}` },
                        [`${d.severity}${where}: ${d.message}`]));
    }
  }

  function render() {
    latticeView.update(state.lattice, state.statuses, state.selectedInstance);
    if (state.lattice && state.selectedInstance) {
      latticeView.showInstance(findInstance(state.lattice, state.selectedInstance));
    }
    overviewPanel.update(state.graph, null);
  }

  render();
  ruleList.update(editor.model);
}

main().catch((err) => {
  const line = document.getElementById("status-line");
  if (line) line.textContent = `startup failed: ${err}`;
});
