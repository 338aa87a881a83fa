/** Stable per-node colors: a node id always maps to the same color. */

const GOLDEN_ANGLE = 137.50776405003785;

export function nodeColor(nodeId: number): string {
  const hue = ((nodeId * GOLDEN_ANGLE) % 360 + 360) % 360;
  const light = 42 + ((nodeId * 29) % 3) * 8;
  return `hsl(${hue.toFixed(2)}, 68%, ${light}%)`;
}

export const BACKGROUND_COLOR = "#b9b9b9";
export const HIGHLIGHT_COLOR = "#d62728";
