import { describe, expect, it } from "vitest";
import { relatedEntities, stepRows } from "../src/state.js";
import type { LatticeSummary } from "../src/types.js";

describe("view state helpers", () => {
  const entities = [
    { kind: "node", id: "a" },
    { kind: "node", id: "b" },
    { kind: "edge", id: "e", source: { entity: "a" }, target: { entity: "b" } },
    { kind: "group", id: "G", members: ["a", "e"] },
  ];

  it("hovering a node highlights touching edges and containing groups", () => {
    const related = relatedEntities(entities, "a");
    expect(related).toEqual(new Set(["a", "e", "G"]));
  });

  it("hovering an edge highlights its endpoints", () => {
    const related = relatedEntities(entities, "e");
    expect(related.has("a")).toBe(true);
    expect(related.has("b")).toBe(true);
  });

  it("hovering a group highlights its members", () => {
    const related = relatedEntities(entities, "G");
    expect(related).toEqual(new Set(["G", "a", "e"]));
  });

  it("step rows follow the server's suggested order verbatim", () => {
    const summary = {
      suggestedOrder: ["backbone", "fs:r0", "fs-final", "cell:r2", "cell:r2~r3"],
    } as unknown as LatticeSummary;
    const rows = stepRows(summary);
    expect(rows.map((r) => r.ref)).toEqual(summary.suggestedOrder);
    expect(rows[3].label).toBe("[r2]");
    expect(rows[4].label).toBe("[r2, r3]");
  });
});
