/** Dendrogram layout: pure geometry, no DOM.
 *
 * Every node becomes a vertical segment spanning its start/end value on
 * the chosen scale; siblings are ordered largest-first (left to right)
 * and each takes a horizontal slot proportional to its size, so bigger
 * branches get more whitespace and segments never overlap. Thickness
 * grows monotonically with node size.
 */

import type { Scale, TreeDocument, TreeNodeRow } from "./types";

export interface Segment {
  id: number;
  x: number; // [0, 1]
  y0: number; // span start on the chosen scale
  y1: number;
  thickness: number; // pixels
  size: number;
}

export interface Connector {
  parent: number;
  child: number;
  y: number; // split value on the chosen scale
  x0: number;
  x1: number;
}

export interface DendrogramLayout {
  segments: Segment[];
  connectors: Connector[];
  yMax: number;
}

const MIN_THICKNESS = 1.2;
const MAX_THICKNESS = 11;

function span(node: TreeNodeRow, scale: Scale): [number, number] {
  return scale === "mass"
    ? [node.start_mass, node.end_mass]
    : [node.start_level, node.end_level];
}

export function layoutDendrogram(
  tree: TreeDocument,
  scale: Scale,
): DendrogramLayout {
  const byId = new Map(tree.nodes.map((node) => [node.id, node]));
  const roots = tree.nodes
    .filter((node) => node.parent === null)
    .sort((a, b) => b.size - a.size || a.id - b.id);

  const segments: Segment[] = [];
  const connectors: Connector[] = [];
  const total = roots.reduce((acc, node) => acc + node.size, 0) || 1;
  const maxSize = Math.max(...tree.nodes.map((node) => node.size));

  const thickness = (size: number) =>
    MIN_THICKNESS + (MAX_THICKNESS - MIN_THICKNESS) * (size / maxSize);

  const place = (node: TreeNodeRow, lo: number, hi: number): number => {
    const x = (lo + hi) / 2;
    const [y0, y1] = span(node, scale);
    segments.push({ id: node.id, x, y0, y1, thickness: thickness(node.size), size: node.size });
    const children = node.children
      .map((id) => byId.get(id)!)
      .sort((a, b) => b.size - a.size || a.id - b.id);
    if (children.length > 0) {
      const childTotal = children.reduce((acc, c) => acc + c.size, 0);
      let cursor = lo;
      for (const child of children) {
        const width = ((hi - lo) * child.size) / childTotal;
        const childX = place(child, cursor, cursor + width);
        connectors.push({ parent: node.id, child: child.id, y: y1, x0: x, x1: childX });
        cursor += width;
      }
    }
    return x;
  };

  let cursor = 0;
  for (const root of roots) {
    const width = root.size / total;
    place(root, cursor, cursor + width);
    cursor += width;
  }

  const yMax = Math.max(...segments.map((s) => s.y1));
  return { segments, connectors, yMax };
}
