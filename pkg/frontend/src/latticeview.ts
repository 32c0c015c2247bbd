// Instantiation view: the backbone diagram feeds per-rule preview circles,
// which converge into the fully-specified circle, which fans out into the
// layered combination cells (heights proportional to server-reported
// instance counts) joined by subset flows. Clicking any element selects it;
// instance chips are colored by execution status.

import { clear, el, svg } from "./dom.js";
import { latticeGeometry } from "./layout.js";
import { statusColor } from "./colors.js";
import { cellInstanceChips } from "./state.js";
import type { InstanceJson, LatticeArtifact, StatusMap } from "./types.js";
import { drawPattern } from "./results.js";

export interface LatticeViewCallbacks {
  onSelectInstance: (id: string) => void;
  onRunStep: (ref: string) => void;
}

export class LatticeView {
  private host: HTMLElement;
  private detail: HTMLElement;
  private callbacks: LatticeViewCallbacks;

  constructor(host: HTMLElement, detail: HTMLElement, callbacks: LatticeViewCallbacks) {
    this.host = host;
    this.detail = detail;
    this.callbacks = callbacks;
  }

  update(lattice: LatticeArtifact | null, statuses: StatusMap, selected: string | null) {
    clear(this.host);
    if (!lattice) {
      this.host.append(el("div", { class: "rl-empty" }, ["instantiate a query to see the lattice"]));
      return;
    }
    // the backbone structure itself, as a small node-link diagram feeding the
    // preview circles
    const backboneBox = el("div", { class: "backbone-box" });
    backboneBox.append(drawPattern(lattice.backbone.pattern, 200, 120));
    this.host.append(backboneBox);

    const stageRow = el("div", { class: "stage-row" });
    stageRow.append(this.stageCircle("backbone", "backbone", lattice.backbone, statuses, selected));
    for (const preview of lattice.fsPreviews) {
      stageRow.append(this.stageCircle(preview.id, preview.id.replace("fs:", "rule "), preview, statuses, selected));
    }
    stageRow.append(this.stageCircle("fs-final", "fully specified", lattice.fsFinal, statuses, selected));
    this.host.append(stageRow);

    const cells = lattice.layers.flat().map((c) => ({
      id: c.id, layer: c.layer, instanceCount: c.instances.length,
    }));
    if (cells.length) {
      const geom = latticeGeometry(cells, lattice.flows);
      const canvas = svg("svg", {
        viewBox: `0 0 ${geom.width} ${geom.height}`, class: "lattice-canvas",
        width: String(geom.width), height: String(geom.height),
      });
      for (const flow of geom.flows) {
        const mid = (flow.x1 + flow.x2) / 2;
        canvas.append(svg("path", {
          d: `M${flow.x1},${flow.y1} C${mid},${flow.y1} ${mid},${flow.y2} ${flow.x2},${flow.y2}`,
          class: "flow",
        }));
      }
      const byId = new Map(lattice.layers.flat().map((c) => [c.id, c]));
      for (const box of geom.cells) {
        const cell = byId.get(box.id)!;
        const group = svg("g", { transform: `translate(${box.x},${box.y})` });
        group.append(svg("rect", {
          width: String(box.width), height: String(box.height), rx: "3",
          class: selected === box.id ? "cell selected" : "cell",
        }));
        const chips = cellInstanceChips(cell, statuses);
        const chipHeight = box.height / chips.length;
        chips.forEach((chip, i) => {
          const rect = svg("rect", {
            x: "1", y: String(i * chipHeight + 0.5),
            width: String(box.width - 2), height: String(Math.max(1, chipHeight - 1)),
            fill: chip.color,
            class: selected === chip.id ? "chip selected" : "chip",
          });
          rect.addEventListener("click", () => this.callbacks.onSelectInstance(chip.id));
          rect.append(svg("title", {}, []));
          (rect.lastChild as SVGElement).textContent =
            `${chip.id}${chip.label ? ` · ${chip.label} results` : ""}`;
          group.append(rect);
        });
        const label = svg("text", { x: String(box.width / 2), y: "-4", class: "cell-label" });
        label.textContent = `[${cell.ruleSet.join(",")}] ×${cell.instances.length}`;
        group.append(label);
        const run = svg("text", { x: String(box.width / 2), y: String(box.height + 12), class: "run-btn" });
        run.textContent = "▶ run";
        run.addEventListener("click", () => this.callbacks.onRunStep(box.id));
        group.append(run);
        canvas.append(group);
      }
      this.host.append(canvas);
    }
  }

  private stageCircle(ref: string, label: string, instance: InstanceJson,
                      statuses: StatusMap, selected: string | null): HTMLElement {
    const wrap = el("div", { class: "stage" });
    const st = statuses[instance.id];
    const dot = el("div", { class: selected === instance.id ? "stage-dot selected" : "stage-dot" });
    dot.style.background = statusColor(st);
    dot.addEventListener("click", () => this.callbacks.onSelectInstance(instance.id));
    const count = st?.status === "found" ? ` ${st.count}${st.complete ? "" : "+"}` : "";
    const caption = el("div", { class: "stage-label" }, [label + count]);
    const run = el("button", { class: "mini" }, ["▶"]);
    run.addEventListener("click", () => this.callbacks.onRunStep(ref));
    wrap.append(dot, caption, run);
    return wrap;
  }

  showInstance(instance: InstanceJson | undefined) {
    clear(this.detail);
    if (!instance) return;
    this.detail.append(el("div", { class: "detail-title" }, [instance.id]));
    const assignment = Object.entries(instance.assignment)
      .map(([rid, params]) => `${rid}: ${Object.entries(params).map(([k, v]) => `${k}=${v}`).join(" ")}`)
      .join(" · ");
    if (assignment) this.detail.append(el("div", { class: "detail-sub" }, [assignment]));
    this.detail.append(drawPattern(instance.pattern, 360, 200));
  }
}
