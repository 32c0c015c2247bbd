// Deterministic seeded force layout for node-link diagrams, and the layered
// geometry of the instantiation view. Pure functions: identical inputs give
// identical pixel output, which keeps visual output reproducible.

export interface LayoutNode {
  id: string;
  x: number;
  y: number;
}

export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function hashString(s: string): number {
  let h = 2166136261;
  for (let i = 0; i < s.length; i++) {
    h ^= s.charCodeAt(i);
    h = Math.imul(h, 16777619);
  }
  return h >>> 0;
}

export function forceLayout(
  ids: string[],
  edges: [string, string][],
  width: number,
  height: number,
  seed = 42,
  iterations = 120,
): LayoutNode[] {
  const rnd = mulberry32(seed);
  const nodes = ids.map((id) => ({
    id,
    x: width * (0.15 + 0.7 * rnd()),
    y: height * (0.15 + 0.7 * rnd()),
  }));
  const index = new Map(ids.map((id, i) => [id, i]));
  const links = edges
    .filter(([a, b]) => index.has(a) && index.has(b))
    .map(([a, b]) => [index.get(a)!, index.get(b)!] as [number, number]);
  const n = nodes.length;
  if (n <= 1) {
    for (const node of nodes) {
      node.x = width / 2;
      node.y = height / 2;
    }
    return nodes;
  }
  const area = width * height;
  const k = Math.sqrt(area / n) * 0.7;
  for (let iter = 0; iter < iterations; iter++) {
    const t = (1 - iter / iterations) * 0.1 * Math.min(width, height);
    const dx = new Array(n).fill(0);
    const dy = new Array(n).fill(0);
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        let vx = nodes[i].x - nodes[j].x;
        let vy = nodes[i].y - nodes[j].y;
        let d2 = vx * vx + vy * vy;
        if (d2 < 1e-6) {
          vx = 0.01 * (1 + ((i * 31 + j) % 7));
          vy = 0.01;
          d2 = vx * vx + vy * vy;
        }
        const rep = (k * k) / d2;
        dx[i] += vx * rep;
        dy[i] += vy * rep;
        dx[j] -= vx * rep;
        dy[j] -= vy * rep;
      }
    }
    for (const [a, b] of links) {
      const vx = nodes[a].x - nodes[b].x;
      const vy = nodes[a].y - nodes[b].y;
      const d = Math.sqrt(vx * vx + vy * vy) || 0.01;
      const att = (d * d) / k / d;
      dx[a] -= vx * att;
      dy[a] += -vy * att;
      dx[b] += vx * att;
      dy[b] += vy * att;
    }
    for (let i = 0; i < n; i++) {
      const d = Math.sqrt(dx[i] * dx[i] + dy[i] * dy[i]) || 1;
      const step = Math.min(d, t);
      nodes[i].x += (dx[i] / d) * step;
      nodes[i].y += (dy[i] / d) * step;
      nodes[i].x = Math.max(16, Math.min(width - 16, nodes[i].x));
      nodes[i].y = Math.max(16, Math.min(height - 16, nodes[i].y));
    }
  }
  return nodes.map((p) => ({ id: p.id, x: Math.round(p.x * 100) / 100, y: Math.round(p.y * 100) / 100 }));
}

// --- instantiation view geometry ------------------------------------------------

export interface CellBox {
  id: string;
  layer: number;
  x: number;
  y: number;
  width: number;
  height: number;
  instanceCount: number;
}

export interface FlowRibbon {
  from: string;
  to: string;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export interface LatticeGeometry {
  width: number;
  height: number;
  cells: CellBox[];
  flows: FlowRibbon[];
}

export interface CellSpec {
  id: string;
  layer: number; // 1-based
  instanceCount: number;
}

export function latticeGeometry(
  cells: CellSpec[],
  flows: { from: string; to: string }[],
  opts = { columnWidth: 150, cellWidth: 64, unitHeight: 10, minHeight: 18, gap: 14, top: 16 },
): LatticeGeometry {
  const layers = new Map<number, CellSpec[]>();
  for (const cell of cells) {
    const list = layers.get(cell.layer) ?? [];
    list.push(cell);
    layers.set(cell.layer, list);
  }
  const boxes: CellBox[] = [];
  let maxBottom = 0;
  const layerIndexes = [...layers.keys()].sort((a, b) => a - b);
  for (const layer of layerIndexes) {
    let y = opts.top;
    const x = (layer - 1) * opts.columnWidth + 20;
    for (const cell of layers.get(layer)!) {
      const height = Math.max(opts.minHeight, cell.instanceCount * opts.unitHeight);
      boxes.push({ id: cell.id, layer, x, y, width: opts.cellWidth, height, instanceCount: cell.instanceCount });
      y += height + opts.gap;
    }
    maxBottom = Math.max(maxBottom, y);
  }
  const byId = new Map(boxes.map((b) => [b.id, b]));
  const ribbons: FlowRibbon[] = [];
  for (const f of flows) {
    const a = byId.get(f.from);
    const b = byId.get(f.to);
    if (!a || !b) continue;
    ribbons.push({
      from: f.from,
      to: f.to,
      x1: a.x + a.width,
      y1: a.y + a.height / 2,
      x2: b.x,
      y2: b.y + b.height / 2,
    });
  }
  const width = layerIndexes.length * opts.columnWidth + 40;
  return { width, height: maxBottom + 8, cells: boxes, flows: ribbons };
}
