// Result analysis: the overview heatmap paints server-reported node/edge
// frequencies over the whole data graph; result cards show one embedding at
// a time with a sidebar to flip through an instance's stored results.

import { clear, el, svg } from "./dom.js";
import { forceLayout, hashString } from "./layout.js";
import { frequencyColor } from "./colors.js";
import type {
  GraphDocument,
  OverviewPayload,
  PatternJson,
  ResultsPayload,
} from "./types.js";

export function drawPattern(pattern: PatternJson, width: number, height: number,
                            nodeLabels?: Record<string, string>): SVGElement {
  const ids = pattern.nodes.map((n) => n.pid);
  const seed = hashString(ids.join("|")) % 100000;
  const placed = forceLayout(ids, pattern.edges.map((e) => [e.source, e.target]),
                             width, height, seed);
  const pos = new Map(placed.map((p) => [p.id, p]));
  const canvas = svg("svg", { viewBox: `0 0 ${width} ${height}`, class: "diagram",
                              width: String(width), height: String(height) });
  for (const e of pattern.edges) {
    const a = pos.get(e.source)!;
    const b = pos.get(e.target)!;
    const cls = e.pathMarker ? "edge marker" : "edge";
    const line = svg("line", { x1: String(a.x), y1: String(a.y), x2: String(b.x), y2: String(b.y), class: cls });
    canvas.append(line);
    if (e.directed) {
      const mx = a.x + (b.x - a.x) * 0.62;
      const my = a.y + (b.y - a.y) * 0.62;
      canvas.append(svg("circle", { cx: String(mx), cy: String(my), r: "2.2", class: "dir-dot" }));
    }
  }
  for (const n of pattern.nodes) {
    const p = pos.get(n.pid)!;
    const hasPreds = n.predicates.length > 0;
    canvas.append(svg("circle", {
      cx: String(p.x), cy: String(p.y), r: "9",
      class: hasPreds ? "pnode constrained" : "pnode",
    }));
    const label = svg("text", { x: String(p.x), y: String(p.y + 20), class: "plabel" });
    label.textContent = nodeLabels?.[n.pid] ?? n.origin.entity;
    canvas.append(label);
  }
  return canvas;
}

export class OverviewPanel {
  private host: HTMLElement;

  constructor(host: HTMLElement) {
    this.host = host;
  }

  update(graph: GraphDocument | null, overview: OverviewPayload | null) {
    clear(this.host);
    if (!graph) {
      this.host.append(el("div", { class: "rl-empty" }, ["load a graph to see the overview"]));
      return;
    }
    const width = 460;
    const height = 320;
    const ids = graph.nodes.map((n) => n.id);
    const placed = forceLayout(ids, graph.edges.map((e) => [e.source, e.target]),
                               width, height, hashString(ids.join("|")) % 100000, 80);
    const pos = new Map(placed.map((p) => [p.id, p]));
    const canvas = svg("svg", { viewBox: `0 0 ${width} ${height}`, class: "diagram overview",
                                width: String(width), height: String(height) });
    const nodeFreq = overview?.nodes ?? {};
    const edgeFreq = overview?.edges ?? {};
    const maxNode = Math.max(1, ...Object.values(nodeFreq));
    const maxEdge = Math.max(1, ...Object.values(edgeFreq));
    for (const e of graph.edges) {
      const a = pos.get(e.source)!;
      const b = pos.get(e.target)!;
      const f = edgeFreq[e.id] ?? 0;
      const line = svg("line", {
        x1: String(a.x), y1: String(a.y), x2: String(b.x), y2: String(b.y),
        class: "gedge", stroke: f > 0 ? frequencyColor(f, maxEdge) : "#ddd",
        "stroke-width": f > 0 ? "2" : "0.7",
      });
      canvas.append(line);
    }
    for (const n of graph.nodes) {
      const p = pos.get(n.id)!;
      const f = nodeFreq[n.id] ?? 0;
      const circle = svg("circle", {
        cx: String(p.x), cy: String(p.y), r: f > 0 ? "5" : "3",
        fill: frequencyColor(f, maxNode), class: "gnode",
      });
      circle.append(svg("title"));
      (circle.lastChild as SVGElement).textContent = `${n.id}${f ? ` ×${f}` : ""}`;
      canvas.append(circle);
    }
    this.host.append(canvas);
  }
}

export class ResultList {
  private host: HTMLElement;
  private index = 0;

  constructor(host: HTMLElement) {
    this.host = host;
  }

  update(payload: ResultsPayload | null, pattern: PatternJson | null) {
    clear(this.host);
    this.index = Math.min(this.index, Math.max(0, (payload?.embeddings.length ?? 1) - 1));
    if (!payload || !pattern) {
      this.host.append(el("div", { class: "rl-empty" }, ["select a found instance"]));
      return;
    }
    const card = el("div", { class: "card" });
    const title = `${payload.instance} — ${payload.count} result${payload.count === 1 ? "" : "s"}` +
      (payload.complete ? "" : " (limited)");
    card.append(el("div", { class: "detail-title" }, [title]));
    const stats = `${pattern.nodes.length} nodes · ${pattern.edges.length} edges`;
    card.append(el("div", { class: "detail-sub" }, [stats]));
    const body = el("div", { class: "card-body" });
    if (payload.embeddings.length) {
      const current = payload.embeddings[this.index];
      body.append(drawPattern(pattern, 340, 220, current.nodes));
      const sidebar = el("div", { class: "sidebar" });
      payload.embeddings.forEach((_, i) => {
        const b = el("button", { class: i === this.index ? "side active" : "side" },
                     [String(i + 1)]);
        b.addEventListener("click", () => {
          this.index = i;
          this.update(payload, pattern);
        });
        sidebar.append(b);
      });
      body.append(sidebar);
    } else {
      body.append(el("div", { class: "rl-empty" }, ["no stored embeddings"]));
    }
    card.append(body);
    this.host.append(card);
  }
}
