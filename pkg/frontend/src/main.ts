/** Explorer bootstrap: fetch the tree and points, wire the views and
 * controls, keep the URL in sync for deep links. */

import { HttpService } from "./api";
import { DendrogramView } from "./dendrogram";
import { chooseStride, Scatter2D, Scatter3D } from "./scatter";
import { ExplorerState } from "./state";

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

async function boot(): Promise<void> {
  const service = new HttpService("");
  const tree = await service.tree();
  const state = new ExplorerState(service, tree);

  const status = el<HTMLSpanElement>("status");
  state.subscribe(() => {
    status.textContent = state.lastError
      ? `error [${state.lastError.code}]: ${state.lastError.message}`
      : `n=${tree.n}, ${tree.nodes.length} nodes, scale=${state.scale}` +
        (state.selected !== null
          ? `, branch ${state.selected}: ${state.highlighted.length} points`
          : "");
    const url = new URL(window.location.href);
    url.search = state.toQuery();
    window.history.replaceState(null, "", url);
  });

  const svg = document.getElementById("dendrogram");
  if (!(svg instanceof SVGSVGElement)) throw new Error("missing #dendrogram");
  new DendrogramView(svg, state);

  try {
    const stride = chooseStride(tree.n);
    const points = await service.points(stride);
    const dim = points.coordinates[0]?.length ?? 0;
    const canvas = el<HTMLCanvasElement>("scatter");
    canvas.width = canvas.clientWidth;
    canvas.height = canvas.clientHeight;
    if (dim >= 3) {
      new Scatter3D(canvas, state, points);
    } else {
      const view = new Scatter2D(canvas, state, points, dim);
      const picker = el<HTMLSelectElement>("axis-pair");
      picker.hidden = false;
      for (let a = 0; a < dim; a++) {
        for (let b = a + 1; b < Math.max(dim, 2); b++) {
          const option = document.createElement("option");
          option.value = `${a},${b}`;
          option.textContent = `axes ${a} / ${b}`;
          picker.appendChild(option);
        }
      }
      picker.addEventListener("change", () => {
        const [a, b] = picker.value.split(",").map(Number);
        view.setAxes(a, b);
      });
    }
  } catch {
    el<HTMLDivElement>("scatter-panel").textContent =
      "no dataset loaded on the server (tree-only mode)";
  }

  const slider = el<HTMLInputElement>("mass-slider");
  slider.addEventListener("input", () => {
    void state.setMass(Number(slider.value));
  });

  const methodPicker = el<HTMLSelectElement>("method");
  const kInput = el<HTMLInputElement>("first-k");
  methodPicker.addEventListener("change", () => {
    kInput.hidden = methodPicker.value !== "first-k";
    if (methodPicker.value === "leaf") void state.setMethod("leaf");
    if (methodPicker.value === "first-k") {
      void state.setMethod("first-k", Number(kInput.value));
    }
  });
  kInput.addEventListener("change", () => {
    void state.setMethod("first-k", Number(kInput.value));
  });

  el<HTMLButtonElement>("scale-toggle").addEventListener("click", () => {
    state.toggleScale();
  });

  await state.applyQuery(window.location.search);
}

void boot();
