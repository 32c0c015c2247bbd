// The editor represents a query as plain objects and emits canonical DSL
// text; the server parses and validates it, keeping one query format across
// CLI and UI.

import type { AttrValue } from "./types.js";

export interface Range {
  lo: number;
  hi: number;
}

export type EditorEntity =
  | { kind: "node"; id: string; x: number; y: number }
  | { kind: "motif"; id: string; motif: "path" | "loop" | "tree" | "clique";
      nodes: Range; width?: Range; depth?: Range; x: number; y: number }
  | { kind: "edge"; id: string; source: string; sourcePort?: "head" | "tail";
      target: string; targetPort?: "head" | "tail"; directed: boolean }
  | { kind: "group"; id: string; members: string[] };

export type EditorRule =
  | { kind: "attr"; target: string; selector: "node" | "edge" | "nodes in" | "edges in";
      attr: string; op: "==" | "!=" | "<" | "<=" | ">" | ">="; literal: AttrValue }
  | { kind: "repeat"; target: string; count: Range }
  | { kind: "chain"; target: string; start: string; end: string;
      iterations: Range; mode: "linked" | "shared" };

export interface EditorModel {
  name: string;
  entities: EditorEntity[];
  rules: EditorRule[];
}

const IDENT = /^[A-Za-z_][A-Za-z0-9_]*$/;

export function renderString(value: string): string {
  const escaped = value
    .replace(/\\/g, "\\\\")
    .replace(/"/g, '\\"')
    .replace(/\n/g, "\\n")
    .replace(/\t/g, "\\t");
  return `"${escaped}"`;
}

export function renderLiteral(value: AttrValue): string {
  if (typeof value === "boolean") return value ? "true" : "false";
  if (typeof value === "string") return renderString(value);
  if (Number.isInteger(value)) return String(value);
  return String(value);
}

export function renderRange(r: Range): string {
  return r.lo === r.hi ? String(r.lo) : `${r.lo}..${r.hi}`;
}

function attrName(name: string): string {
  return IDENT.test(name) ? name : renderString(name);
}

function ref(id: string, port?: "head" | "tail"): string {
  return port ? `${id}.${port}` : id;
}

export function generateDsl(model: EditorModel): string {
  const lines: string[] = [`query ${renderString(model.name)} {`];
  for (const ent of model.entities) {
    if (ent.kind === "node") {
      lines.push(`  node ${ent.id};`);
    } else if (ent.kind === "motif") {
      const params = [`nodes=${renderRange(ent.nodes)}`];
      if (ent.width) params.push(`width=${renderRange(ent.width)}`);
      if (ent.depth) params.push(`depth=${renderRange(ent.depth)}`);
      lines.push(`  motif ${ent.id} = ${ent.motif}(${params.join(", ")});`);
    } else if (ent.kind === "edge") {
      const arrow = ent.directed ? "->" : "--";
      lines.push(`  edge ${ent.id} = ${ref(ent.source, ent.sourcePort)} ${arrow} ${ref(ent.target, ent.targetPort)};`);
    } else {
      lines.push(`  group ${ent.id} = { ${ent.members.join(", ")} };`);
    }
  }
  for (const rule of model.rules) {
    if (rule.kind === "attr") {
      lines.push(`  rule attr ${rule.selector} ${rule.target}: ` +
        `${attrName(rule.attr)} ${rule.op} ${renderLiteral(rule.literal)};`);
    } else if (rule.kind === "repeat") {
      lines.push(`  rule repeat ${rule.target}: count = ${renderRange(rule.count)};`);
    } else {
      lines.push(`  rule chain ${rule.target}: start=${rule.start}, end=${rule.end}, ` +
        `iterations=${renderRange(rule.iterations)}, mode=${rule.mode};`);
    }
  }
  if (lines.length === 1) return `query ${renderString(model.name)} { }\n`;
  lines.push("}");
  return lines.join("\n") + "\n";
}

let counter = 0;

export function freshId(prefix: string, taken: Set<string>): string {
  for (;;) {
    const id = `${prefix}${counter++}`;
    if (!taken.has(id)) return id;
  }
}

export function resetIds() {
  counter = 0;
}
