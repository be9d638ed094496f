/** Small deterministic force-directed layout.
 *
 * Link springs + pairwise repulsion + centering, run for a fixed number of
 * synchronous iterations. Initial positions are seeded from node-id hashes
 * so the same subgraph always lays out the same way.
 */

export interface LayoutNode {
  id: string;
  x: number;
  y: number;
}

export interface LayoutLink {
  source: string;
  target: string;
}

export interface LayoutOptions {
  width: number;
  height: number;
  iterations?: number;
  linkDistance?: number;
  repulsion?: number;
}

function hash01(text: string, salt: number): number {
  let h = 2166136261 >>> 0;
  for (let i = 0; i < text.length; i++) {
    h = Math.imul(h ^ text.charCodeAt(i), 16777619) >>> 0;
  }
  h = Math.imul(h ^ salt, 2654435761) >>> 0;
  return (h >>> 8) / (1 << 24);
}

export function layout(
  ids: string[],
  links: LayoutLink[],
  options: LayoutOptions,
): Map<string, LayoutNode> {
  const width = options.width;
  const height = options.height;
  const iterations = options.iterations ?? 150;
  const linkDistance = options.linkDistance ?? 60;
  const repulsion = options.repulsion ?? 1200;

  const nodes: LayoutNode[] = ids.map((id) => ({
    id,
    x: (0.15 + 0.7 * hash01(id, 1)) * width,
    y: (0.15 + 0.7 * hash01(id, 2)) * height,
  }));
  const index = new Map(nodes.map((n) => [n.id, n]));
  const pairs = links
    .map((l) => [index.get(l.source), index.get(l.target)] as const)
    .filter((pair): pair is readonly [LayoutNode, LayoutNode] =>
      Boolean(pair[0] && pair[1] && pair[0] !== pair[1]),
    );

  for (let step = 0; step < iterations; step++) {
    const temperature = 0.1 * (1 - step / iterations) + 0.02;

    for (let i = 0; i < nodes.length; i++) {
      for (let j = i + 1; j < nodes.length; j++) {
        const a = nodes[i];
        const b = nodes[j];
        let dx = a.x - b.x;
        let dy = a.y - b.y;
        let d2 = dx * dx + dy * dy;
        if (d2 < 1e-4) {
          dx = hash01(a.id + b.id, step) - 0.5;
          dy = hash01(b.id + a.id, step) - 0.5;
          d2 = dx * dx + dy * dy;
        }
        const force = (repulsion / d2) * temperature;
        a.x += dx * force * 0.01;
        a.y += dy * force * 0.01;
        b.x -= dx * force * 0.01;
        b.y -= dy * force * 0.01;
      }
    }

    for (const [a, b] of pairs) {
      const dx = b.x - a.x;
      const dy = b.y - a.y;
      const distance = Math.sqrt(dx * dx + dy * dy) || 1;
      const stretch = ((distance - linkDistance) / distance) * temperature;
      a.x += dx * stretch * 0.5;
      a.y += dy * stretch * 0.5;
      b.x -= dx * stretch * 0.5;
      b.y -= dy * stretch * 0.5;
    }

    const cx = nodes.reduce((s, n) => s + n.x, 0) / (nodes.length || 1);
    const cy = nodes.reduce((s, n) => s + n.y, 0) / (nodes.length || 1);
    for (const node of nodes) {
      node.x += (width / 2 - cx) * 0.05;
      node.y += (height / 2 - cy) * 0.05;
      node.x = Math.min(width - 10, Math.max(10, node.x));
      node.y = Math.min(height - 10, Math.max(10, node.y));
    }
  }
  return index;
}
