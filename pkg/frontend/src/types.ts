// Server payload shapes (the service is the single source of truth; the UI
// never recomputes instantiation or counts locally).

export type AttrValue = string | number | boolean;

export interface Diagnostic {
  severity: "error" | "warning";
  message: string;
  subject?: string;
  line?: number;
  column?: number;
  length?: number;
}

export interface PredicateJson {
  attr: string;
  op: "==" | "!=" | "<" | "<=" | ">" | ">=";
  literal: AttrValue;
}

export interface PatternNodeJson {
  pid: string;
  predicates: PredicateJson[];
  origin: { entity: string; copy: string; local: string };
}

export interface PatternEdgeJson {
  pid: string;
  source: string;
  target: string;
  directed: boolean;
  predicates: PredicateJson[];
  origin: { entity: string; copy: string; local: string };
  pathMarker?: { minNodes: number };
}

export interface PatternJson {
  nodes: PatternNodeJson[];
  edges: PatternEdgeJson[];
}

export interface InstanceJson {
  id: string;
  stage: { kind: string; rule?: string; layer?: number; ruleSet?: string[] };
  assignment: Record<string, Record<string, number>>;
  pattern: PatternJson;
}

export interface CellJson {
  id: string;
  layer: number;
  ruleSet: string[];
  instances: InstanceJson[];
}

export interface EntityJson {
  kind: "node" | "edge" | "motif" | "group";
  id: string;
  directed?: boolean;
  source?: { entity: string; port: string | null };
  target?: { entity: string; port: string | null };
  motif?: string;
  members?: string[];
}

export interface RuleJson {
  id: string;
  target: string;
  body: {
    kind: "nodeAttr" | "edgeAttr" | "motifConfig" | "repeat" | "chain";
    predicate?: PredicateJson;
    nodes?: [number, number] | null;
    width?: [number, number] | null;
    depth?: [number, number] | null;
    count?: [number, number];
    start?: string;
    end?: string;
    iterations?: [number, number];
    mode?: "linked" | "shared";
  };
}

export interface RepresentationJson {
  name: string;
  entities: EntityJson[];
  rules: RuleJson[];
}

export interface LatticeArtifact {
  query: string;
  representation: RepresentationJson;
  directed: boolean;
  fullySpecifiedRules: string[];
  underspecifiedRules: string[];
  backbone: InstanceJson;
  fsPreviews: InstanceJson[];
  fsFinal: InstanceJson;
  layers: CellJson[][];
  flows: { from: string; to: string }[];
  embeddings: { from: string; to: string; nodes: Record<string, string>; edges: Record<string, string> }[];
}

export interface LatticeSummaryCell {
  id: string;
  ruleSet: string[];
  instances: number;
}

export interface LatticeSummary {
  query: string;
  directed: boolean;
  fullySpecifiedRules: string[];
  underspecifiedRules: string[];
  previews: string[];
  layers: LatticeSummaryCell[][];
  instanceCount: number;
  suggestedOrder: string[];
}

export interface InstanceStatusJson {
  status: "not-run" | "empty" | "found" | "pruned-empty";
  assignment: Record<string, Record<string, number>>;
  count?: number;
  complete?: boolean;
  cause?: string;
}

export type StatusMap = Record<string, InstanceStatusJson>;

export interface EmbeddingJson {
  nodes: Record<string, string>;
  edges: Record<string, string>;
}

export interface ResultsPayload {
  instance: string;
  status: string;
  count: number;
  complete: boolean;
  cause: string | null;
  assignment: Record<string, Record<string, number>>;
  embeddings: EmbeddingJson[];
}

export interface OverviewPayload {
  nodes: Record<string, number>;
  edges: Record<string, number>;
  over: string[];
}

export interface TranslatePayload {
  instance: string;
  text: string;
  varMap: Record<string, string>;
}

export interface GraphDocument {
  directed: boolean;
  nodes: { id: string; attrs: Record<string, AttrValue> }[];
  edges: { id: string; source: string; target: string; label?: string; attrs: Record<string, AttrValue> }[];
}
