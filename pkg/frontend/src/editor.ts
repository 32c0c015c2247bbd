// Query editor canvas: add nodes/motifs with buttons, drag to reposition,
// connect two entities with an edge, group a selection, attach rules from a
// context menu. The editor's only output is canonical DSL text.

import { clear, el, openMenu, svg } from "./dom.js";
import {
  EditorEntity,
  EditorModel,
  EditorRule,
  Range,
  freshId,
  generateDsl,
} from "./dslgen.js";
import { RULE_KIND_COLORS } from "./colors.js";

export interface EditorCallbacks {
  onModelChange: (model: EditorModel, dsl: string) => void;
  onHover: (entityId: string | null) => void;
}

const MOTIF_GLYPHS: Record<string, string> = {
  path: "—", loop: "◯", tree: "⋔", clique: "▩",
};

function parseRange(raw: string, fallback: Range): Range {
  const m = raw.trim().match(/^(-?\d+)(?:\.\.(-?\d+))?$/);
  if (!m) return fallback;
  const lo = parseInt(m[1], 10);
  const hi = m[2] === undefined ? lo : parseInt(m[2], 10);
  return hi < lo ? fallback : { lo, hi };
}

export class Editor {
  model: EditorModel = { name: "untitled", entities: [], rules: [] };
  private host: HTMLElement;
  private canvas: SVGElement;
  private callbacks: EditorCallbacks;
  private selected: string[] = [];
  private connectMode = false;
  private highlight: Set<string> = new Set();

  constructor(host: HTMLElement, callbacks: EditorCallbacks) {
    this.host = host;
    this.callbacks = callbacks;
    const toolbar = el("div", { class: "toolbar" });
    const addButton = (label: string, action: () => void) => {
      const b = el("button", {}, [label]);
      b.addEventListener("click", action);
      toolbar.append(b);
    };
    addButton("+ node", () => this.addNode());
    for (const kind of ["path", "loop", "tree", "clique"] as const) {
      addButton(`+ ${kind}`, () => this.addMotif(kind));
    }
    addButton("connect", () => {
      this.connectMode = !this.connectMode;
      this.selected = [];
      this.render();
    });
    addButton("group selection", () => this.groupSelection());
    addButton("clear", () => {
      this.model = { name: this.model.name, entities: [], rules: [] };
      this.selected = [];
      this.emit();
    });
    this.canvas = svg("svg", { class: "editor-canvas", viewBox: "0 0 640 360" });
    this.host.append(toolbar, this.canvas);
    this.render();
  }

  private taken(): Set<string> {
    return new Set(this.model.entities.map((e) => e.id));
  }

  private addNode() {
    const id = freshId("n", this.taken());
    const i = this.model.entities.length;
    this.model.entities.push({ kind: "node", id, x: 80 + (i % 6) * 90, y: 70 + Math.floor(i / 6) * 80 });
    this.emit();
  }

  private addMotif(kind: "path" | "loop" | "tree" | "clique") {
    const id = freshId(kind[0].toUpperCase(), this.taken());
    const i = this.model.entities.length;
    const minimum = kind === "loop" ? 3 : 2;
    this.model.entities.push({
      kind: "motif", id, motif: kind, nodes: { lo: minimum, hi: minimum },
      x: 80 + (i % 6) * 90, y: 70 + Math.floor(i / 6) * 80,
    });
    this.emit();
  }

  private groupSelection() {
    const members = this.selected.filter((id) =>
      this.model.entities.some((e) => e.id === id && e.kind !== "group"));
    if (!members.length) return;
    const id = freshId("G", this.taken());
    this.model.entities.push({ kind: "group", id, members });
    this.selected = [];
    this.emit();
  }

  private addEdge(source: string, target: string) {
    const id = freshId("e", this.taken());
    const pick = (entId: string): "head" | "tail" | undefined => {
      const ent = this.model.entities.find((e) => e.id === entId);
      if (ent?.kind === "motif" && ent.motif === "path") {
        const port = window.prompt(`attach to ${entId} at (head|tail)`, "head");
        return port === "tail" ? "tail" : "head";
      }
      return undefined;
    };
    this.model.entities.push({
      kind: "edge", id, source, sourcePort: pick(source),
      target, targetPort: pick(target),
      directed: window.confirm("directed edge? (cancel = undirected)"),
    });
    this.emit();
  }

  private entityMenu(ent: EditorEntity, x: number, y: number) {
    const items = [];
    items.push({
      label: "attribute rule...",
      action: () => {
        const isEdgeLike = ent.kind === "edge";
        const scoped = ent.kind === "motif" || ent.kind === "group";
        const side = scoped && window.confirm("edge attribute rule? (cancel = node)") ? "edge" : "node";
        const selector = !scoped ? (isEdgeLike ? "edge" : "node")
          : side === "edge" ? "edges in" : "nodes in";
        const attr = window.prompt("attribute name", "value");
        if (!attr) return;
        const ops = ["==", "!=", "<", "<=", ">", ">="] as const;
        const rawOp = window.prompt("operator (== != < <= > >=)", ">") ?? ">";
        const op = (ops as readonly string[]).includes(rawOp) ? rawOp as (typeof ops)[number] : ">";
        const raw = window.prompt("literal (number, \"string\", true/false)", "0") ?? "0";
        let literal: string | number | boolean = raw;
        if (raw === "true" || raw === "false") literal = raw === "true";
        else if (/^-?\d+(\.\d+)?$/.test(raw)) literal = parseFloat(raw);
        else literal = raw.replace(/^"|"$/g, "");
        this.model.rules.push({ kind: "attr", target: ent.id, selector, attr, op, literal });
        this.emit();
      },
    });
    if (ent.kind === "motif") {
      items.push({
        label: "configure size...",
        action: () => {
          ent.nodes = parseRange(window.prompt("nodes (lo..hi)", "2..4") ?? "", ent.nodes);
          if (ent.motif === "tree") {
            const w = window.prompt("max width (blank = none)", "");
            ent.width = w ? parseRange(w, { lo: 1, hi: 1 }) : undefined;
            const d = window.prompt("max depth (blank = none)", "");
            ent.depth = d ? parseRange(d, { lo: 1, hi: 1 }) : undefined;
          }
          this.emit();
        },
      });
    }
    items.push({
      label: "repeat rule...",
      action: () => {
        const count = parseRange(window.prompt("count (lo..hi)", "0..2") ?? "", { lo: 0, hi: 1 });
        this.model.rules.push({ kind: "repeat", target: ent.id, count });
        this.emit();
      },
    });
    if (ent.kind === "node" || ent.kind === "group") {
      items.push({
        label: "chain rule...",
        action: () => {
          const start = ent.kind === "node" ? ent.id
            : window.prompt("start node", "") ?? "";
          const end = ent.kind === "node" ? ent.id
            : window.prompt("end node", "") ?? "";
          const iterations = parseRange(window.prompt("iterations (lo..hi)", "0..2") ?? "", { lo: 0, hi: 1 });
          const mode = window.confirm("linked mode? (cancel = shared)") ? "linked" : "shared";
          this.model.rules.push({ kind: "chain", target: ent.id, start, end, iterations, mode });
          this.emit();
        },
      });
    }
    items.push({
      label: "delete entity",
      action: () => {
        this.model.entities = this.model.entities.filter((e) => e !== ent);
        this.model.entities = this.model.entities.filter((e) =>
          !(e.kind === "edge" && (e.source === ent.id || e.target === ent.id)));
        for (const g of this.model.entities) {
          if (g.kind === "group") g.members = g.members.filter((m) => m !== ent.id);
        }
        this.model.rules = this.model.rules.filter((r) => r.target !== ent.id);
        this.emit();
      },
    });
    openMenu(x, y, items);
  }

  removeRule(index: number) {
    if (index >= 0) this.model.rules.splice(index, 1);
    this.emit();
  }

  /** Re-emit after external edits to the model (e.g. rule-list editing). */
  refresh() {
    this.emit();
  }

  setHighlight(ids: Set<string>) {
    this.highlight = ids;
    this.render();
  }

  loadModel(model: EditorModel) {
    this.model = model;
    this.selected = [];
    this.emit();
  }

  private emit() {
    this.render();
    this.callbacks.onModelChange(this.model, generateDsl(this.model));
  }

  private positioned(): (EditorEntity & { x: number; y: number })[] {
    return this.model.entities.filter(
      (e): e is EditorEntity & { x: number; y: number } => e.kind === "node" || e.kind === "motif");
  }

  render() {
    clear(this.canvas);
    const pos = new Map(this.positioned().map((e) => [e.id, e]));
    for (const ent of this.model.entities) {
      if (ent.kind !== "edge") continue;
      const a = pos.get(ent.source);
      const b = pos.get(ent.target);
      if (!a || !b) continue;
      const cls = this.highlight.has(ent.id) ? "edge hl" : "edge";
      const line = svg("line", {
        x1: String(a.x), y1: String(a.y), x2: String(b.x), y2: String(b.y), class: cls,
      });
      if (ent.directed) line.setAttribute("marker-end", "url(#arrow)");
      this.canvas.append(line);
    }
    const defs = svg("defs", {}, [
      svg("marker", { id: "arrow", viewBox: "0 0 8 8", refX: "14", refY: "4",
                      markerWidth: "7", markerHeight: "7", orient: "auto" },
        [svg("path", { d: "M0,0 L8,4 L0,8 z", fill: "#555" })]),
    ]);
    this.canvas.append(defs);
    for (const ent of this.positioned()) {
      const group = svg("g", { class: "entity", transform: `translate(${ent.x},${ent.y})` });
      const selected = this.selected.includes(ent.id);
      const classes = ["shape"];
      if (selected) classes.push("selected");
      if (this.highlight.has(ent.id)) classes.push("hl");
      if (ent.kind === "motif") {
        group.append(svg("rect", { x: "-22", y: "-16", width: "44", height: "32", rx: "7", class: classes.join(" ") }));
        group.append(svg("text", { y: "-2", class: "glyph" }, []));
        group.lastElementChild!.textContent = MOTIF_GLYPHS[ent.motif];
      } else {
        group.append(svg("circle", { r: "16", class: classes.join(" ") }));
      }
      const label = svg("text", { y: ent.kind === "motif" ? "12" : "4", class: "label" });
      label.textContent = ent.id;
      group.append(label);
      group.addEventListener("mouseenter", () => this.callbacks.onHover(ent.id));
      group.addEventListener("mouseleave", () => this.callbacks.onHover(null));
      group.addEventListener("click", (ev) => {
        ev.stopPropagation();
        if (this.connectMode) {
          this.selected.push(ent.id);
          if (this.selected.length === 2) {
            const [a, b] = this.selected;
            this.connectMode = false;
            this.selected = [];
            this.addEdge(a, b);
            return;
          }
        } else if (this.selected.includes(ent.id)) {
          this.selected = this.selected.filter((s) => s !== ent.id);
        } else {
          this.selected.push(ent.id);
        }
        this.render();
      });
      group.addEventListener("contextmenu", (ev) => {
        ev.preventDefault();
        this.entityMenu(ent, (ev as MouseEvent).clientX, (ev as MouseEvent).clientY);
      });
      this.attachDrag(group, ent);
      this.canvas.append(group);
    }
  }

  private attachDrag(group: SVGElement, ent: { x: number; y: number }) {
    let dragging = false;
    let start: { x: number; y: number; ex: number; ey: number } | null = null;
    group.addEventListener("mousedown", (ev) => {
      dragging = true;
      start = { x: (ev as MouseEvent).clientX, y: (ev as MouseEvent).clientY, ex: ent.x, ey: ent.y };
    });
    const move = (ev: MouseEvent) => {
      if (!dragging || !start) return;
      ent.x = start.ex + (ev.clientX - start.x);
      ent.y = start.ey + (ev.clientY - start.y);
      this.render();
    };
    const up = () => {
      if (dragging) {
        dragging = false;
        this.callbacks.onModelChange(this.model, generateDsl(this.model));
      }
    };
    group.addEventListener("mousemove", move);
    group.addEventListener("mouseup", up);
    group.addEventListener("mouseleave", up);
  }
}

export function ruleBlockColor(rule: EditorRule): string {
  if (rule.kind === "attr") {
    return rule.selector.startsWith("edge") ? RULE_KIND_COLORS.edgeAttr : RULE_KIND_COLORS.nodeAttr;
  }
  return rule.kind === "repeat" ? RULE_KIND_COLORS.repeat : RULE_KIND_COLORS.chain;
}
