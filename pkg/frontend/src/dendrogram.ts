/** SVG dendrogram view bound to the explorer state. */

import { nodeColor, HIGHLIGHT_COLOR } from "./colors";
import { layoutDendrogram } from "./layout";
import type { ExplorerState } from "./state";

const SVG_NS = "http://www.w3.org/2000/svg";
const PAD = 24;

export class DendrogramView {
  constructor(
    private readonly svg: SVGSVGElement,
    private readonly state: ExplorerState,
  ) {
    state.subscribe(() => this.render());
    this.render();
  }

  private clusterIds(): Set<number> {
    const out = new Set<number>();
    if (this.state.labeling) {
      for (const label of this.state.labeling.labels) {
        if (label !== null) out.add(label);
      }
    }
    return out;
  }

  render(): void {
    const { svg, state } = this;
    const width = svg.clientWidth || 640;
    const height = svg.clientHeight || 420;
    svg.replaceChildren();
    const layout = layoutDendrogram(state.tree, state.scale);
    const sx = (x: number) => PAD + x * (width - 2 * PAD);
    const sy = (y: number) =>
      height - PAD - (y / (layout.yMax || 1)) * (height - 2 * PAD);

    const clusters = this.clusterIds();
    for (const conn of layout.connectors) {
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(sx(conn.x0)));
      line.setAttribute("x2", String(sx(conn.x1)));
      line.setAttribute("y1", String(sy(conn.y)));
      line.setAttribute("y2", String(sy(conn.y)));
      line.setAttribute("stroke", "#555");
      line.setAttribute("stroke-width", "1");
      svg.appendChild(line);
    }
    for (const seg of layout.segments) {
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(sx(seg.x)));
      line.setAttribute("x2", String(sx(seg.x)));
      line.setAttribute("y1", String(sy(seg.y0)));
      line.setAttribute("y2", String(sy(seg.y1)));
      line.setAttribute("stroke-width", String(seg.thickness));
      line.setAttribute("data-node", String(seg.id));
      line.style.cursor = "pointer";
      const isSelected = state.selected === seg.id;
      const color = isSelected
        ? HIGHLIGHT_COLOR
        : clusters.has(seg.id)
          ? nodeColor(seg.id)
          : "#222";
      line.setAttribute("stroke", color);
      line.addEventListener("click", () => {
        void state.selectNode(state.selected === seg.id ? null : seg.id);
      });
      svg.appendChild(line);
    }

    // slider cursor across the tree
    if (state.mass !== null && state.scale === "mass") {
      const cut = document.createElementNS(SVG_NS, "line");
      cut.setAttribute("x1", String(PAD / 2));
      cut.setAttribute("x2", String(width - PAD / 2));
      cut.setAttribute("y1", String(sy(state.mass)));
      cut.setAttribute("y2", String(sy(state.mass)));
      cut.setAttribute("stroke", "#999");
      cut.setAttribute("stroke-dasharray", "5 4");
      svg.appendChild(cut);
    }

    const axis = document.createElementNS(SVG_NS, "text");
    axis.setAttribute("x", "6");
    axis.setAttribute("y", "14");
    axis.setAttribute("fill", "#444");
    axis.setAttribute("font-size", "11");
    axis.textContent = state.scale === "mass" ? "mass (background fraction)" : "density level";
    svg.appendChild(axis);
  }
}
