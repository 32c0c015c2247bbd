// Session view-model: raw server payloads plus local view selections. All
// render models are pure functions of this state, so a refresh that replays
// the same server responses restores the identical view.

import type {
  LatticeArtifact,
  LatticeSummary,
  Diagnostic,
  StatusMap,
  InstanceJson,
  CellJson,
  GraphDocument,
  InstanceStatusJson,
} from "./types.js";
import { statusColor, countColor } from "./colors.js";

export interface SessionView {
  sessionId: string | null;
  graph: GraphDocument | null;
  summary: LatticeSummary | null;
  lattice: LatticeArtifact | null;
  statuses: StatusMap;
  diagnostics: Diagnostic[];
  selectedStep: string | null;
  selectedInstance: string | null;
  hoveredEntity: string | null;
}

export function emptySession(): SessionView {
  return {
    sessionId: null,
    graph: null,
    summary: null,
    lattice: null,
    statuses: {},
    diagnostics: [],
    selectedStep: null,
    selectedInstance: null,
    hoveredEntity: null,
  };
}

export function allInstances(lattice: LatticeArtifact): InstanceJson[] {
  const out = [lattice.backbone, ...lattice.fsPreviews, lattice.fsFinal];
  for (const layer of lattice.layers) for (const cell of layer) out.push(...cell.instances);
  return out;
}

export function findInstance(lattice: LatticeArtifact, id: string): InstanceJson | undefined {
  return allInstances(lattice).find((i) => i.id === id);
}

export function findCell(lattice: LatticeArtifact, id: string): CellJson | undefined {
  for (const layer of lattice.layers) {
    const hit = layer.find((c) => c.id === id);
    if (hit) return hit;
  }
  return undefined;
}

export interface InstanceChip {
  id: string;
  color: string;
  status: InstanceStatusJson | undefined;
  label: string;
}

/** Per-instance chips for a cell: the fill encodes status, found instances
 * shade by their server-reported count. Counts are never recomputed here. */
export function cellInstanceChips(cell: CellJson, statuses: StatusMap): InstanceChip[] {
  const counts = cell.instances.map((i) => statuses[i.id]?.count ?? 0);
  const maxCount = Math.max(1, ...counts);
  return cell.instances.map((inst) => {
    const st = statuses[inst.id];
    let color = statusColor(st);
    if (st?.status === "found") color = countColor(st.count ?? 1, maxCount);
    const label = st?.status === "found" ? `${st.count}${st.complete ? "" : "+"}` : "";
    return { id: inst.id, color, status: st, label };
  });
}

/** Steps in the suggested progressive order with display labels. */
export function stepRows(summary: LatticeSummary): { ref: string; label: string }[] {
  return summary.suggestedOrder.map((ref) => {
    let label = ref;
    if (ref === "backbone") label = "backbone";
    else if (ref === "fs-final") label = "fully specified";
    else if (ref.startsWith("fs:")) label = `rule ${ref.slice(3)}`;
    else if (ref.startsWith("cell:")) label = `[${ref.slice(5).split("~").join(", ")}]`;
    return { ref, label };
  });
}

/** Entities related to one entity id: the entity itself, edges touching it,
 * groups containing it, members if it is a group. Used for hover
 * cross-highlighting between the editor and the rule list. */
export function relatedEntities(
  entities: { kind: string; id: string; source?: { entity: string }; target?: { entity: string }; members?: string[] }[],
  id: string,
): Set<string> {
  const related = new Set<string>([id]);
  for (const e of entities) {
    if (e.kind === "edge" && (e.source?.entity === id || e.target?.entity === id)) related.add(e.id);
    if (e.kind === "group" && e.members?.includes(id)) related.add(e.id);
    if (e.id === id && e.kind === "edge") {
      if (e.source) related.add(e.source.entity);
      if (e.target) related.add(e.target.entity);
    }
    if (e.id === id && e.kind === "group") for (const m of e.members ?? []) related.add(m);
  }
  return related;
}
