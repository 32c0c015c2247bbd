// Rule list: every entity on the vertical axis grouped by type, its rules as
// colored blocks to the right. Hovering cross-highlights the editor; right
// click on a block edits/removes the rule.

import { clear, el, openMenu } from "./dom.js";
import { EditorModel, EditorRule, renderLiteral, renderRange } from "./dslgen.js";
import { ruleBlockColor } from "./editor.js";

export interface RuleListCallbacks {
  onHover: (entityId: string | null) => void;
  onRemoveRule: (index: number) => void;
  onEditRule: (index: number) => void;
}

const GROUP_ORDER: [string, string][] = [
  ["node", "nodes"], ["motif", "motifs"], ["edge", "edges"], ["group", "groups"],
];

export function ruleText(rule: EditorRule): string {
  if (rule.kind === "attr") {
    return `${rule.attr} ${rule.op} ${renderLiteral(rule.literal)}`;
  }
  if (rule.kind === "repeat") return `repeat ${renderRange(rule.count)}`;
  return `chain ${renderRange(rule.iterations)} ${rule.mode} (${rule.start}→${rule.end})`;
}

export class RuleList {
  private host: HTMLElement;
  private callbacks: RuleListCallbacks;
  private highlight: Set<string> = new Set();
  private model: EditorModel = { name: "", entities: [], rules: [] };

  constructor(host: HTMLElement, callbacks: RuleListCallbacks) {
    this.host = host;
    this.callbacks = callbacks;
  }

  update(model: EditorModel) {
    this.model = model;
    this.render();
  }

  setHighlight(ids: Set<string>) {
    this.highlight = ids;
    this.render();
  }

  private render() {
    clear(this.host);
    for (const [kind, title] of GROUP_ORDER) {
      const members = this.model.entities.filter((e) => e.kind === kind);
      if (!members.length) continue;
      this.host.append(el("div", { class: "rl-group" }, [title]));
      for (const ent of members) {
        const row = el("div", { class: this.highlight.has(ent.id) ? "rl-row hl" : "rl-row" });
        let label = ent.id;
        if (ent.kind === "edge") {
          label += ` (${ent.source}${ent.directed ? "→" : "–"}${ent.target})`;
        } else if (ent.kind === "group") {
          label += ` {${ent.members.join(", ")}}`;
        } else if (ent.kind === "motif") {
          label += ` ${ent.motif}(${renderRange(ent.nodes)})`;
        }
        const name = el("span", { class: "rl-name" }, [label]);
        name.addEventListener("mouseenter", () => this.callbacks.onHover(ent.id));
        name.addEventListener("mouseleave", () => this.callbacks.onHover(null));
        row.append(name);
        this.model.rules.forEach((rule, index) => {
          if (rule.target !== ent.id) return;
          const block = el("span", { class: "rule-block" }, [ruleText(rule)]);
          block.style.background = ruleBlockColor(rule);
          block.addEventListener("contextmenu", (ev) => {
            ev.preventDefault();
            openMenu((ev as MouseEvent).clientX, (ev as MouseEvent).clientY, [
              { label: "edit rule", action: () => this.callbacks.onEditRule(index) },
              { label: "remove rule", action: () => this.callbacks.onRemoveRule(index) },
            ]);
          });
          row.append(block);
        });
        this.host.append(row);
      }
    }
    if (!this.model.entities.length) {
      this.host.append(el("div", { class: "rl-empty" }, ["no entities yet"]));
    }
  }
}
