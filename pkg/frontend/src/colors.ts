// Status and frequency encodings. Found = green, empty/pruned = red shades,
// not yet run = gray; per-instance result counts map onto a purple gradient;
// overview frequencies onto a red gradient.

import type { InstanceStatusJson } from "./types.js";

export const STATUS_COLORS = {
  "not-run": "#9e9e9e",
  empty: "#c62828",
  "pruned-empty": "#8e1b1b",
  found: "#2e7d32",
} as const;

export function statusColor(status: InstanceStatusJson | undefined): string {
  if (!status) return STATUS_COLORS["not-run"];
  return STATUS_COLORS[status.status] ?? STATUS_COLORS["not-run"];
}

function hexLerp(a: string, b: string, t: number): string {
  const pa = [1, 3, 5].map((i) => parseInt(a.slice(i, i + 2), 16));
  const pb = [1, 3, 5].map((i) => parseInt(b.slice(i, i + 2), 16));
  const mix = pa.map((v, i) => Math.round(v + (pb[i] - v) * Math.max(0, Math.min(1, t))));
  return "#" + mix.map((v) => v.toString(16).padStart(2, "0")).join("");
}

/** Purple gradient over result counts: light for 1 result, saturated at max. */
export function countColor(count: number, maxCount: number): string {
  if (count <= 0) return STATUS_COLORS.empty;
  if (maxCount <= 1) return "#5e35b1";
  const t = Math.log(1 + count) / Math.log(1 + maxCount);
  return hexLerp("#d1c4e9", "#311b92", t);
}

/** Red gradient for the overview heatmap. */
export function frequencyColor(freq: number, maxFreq: number): string {
  if (freq <= 0 || maxFreq <= 0) return "#e0e0e0";
  const t = Math.log(1 + freq) / Math.log(1 + maxFreq);
  return hexLerp("#ffcdd2", "#b71c1c", t);
}

export const RULE_KIND_COLORS: Record<string, string> = {
  nodeAttr: "#1565c0",
  edgeAttr: "#00838f",
  motifConfig: "#ef6c00",
  repeat: "#6a1b9a",
  chain: "#2e7d32",
};
