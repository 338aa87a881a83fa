/** Explorer state machine.
 *
 * Framework-free: holds the tree, the selected branch, the active scale,
 * the current cut level and labeling, and derives per-item colors. User
 * actions run through a queue so cluster requests never overlap. View
 * state round-trips through URL query parameters for deep linking.
 */

import type { ExplorerService } from "./api";
import { ApiError } from "./api";
import { BACKGROUND_COLOR, nodeColor } from "./colors";
import type { LabelingDocument, Scale, TreeDocument } from "./types";

export interface ViewState {
  scale: Scale;
  selected: number | null;
  mass: number | null;
  method: string | null;
  k: number | null;
}

export type Listener = () => void;

export class ExplorerState {
  readonly tree: TreeDocument;
  scale: Scale = "mass";
  selected: number | null = null;
  /** member indices of the selected branch */
  highlighted: number[] = [];
  mass: number | null = null;
  method: string | null = null;
  k: number | null = null;
  labeling: LabelingDocument | null = null;
  lastError: { code: string; message: string } | null = null;

  private queue: Promise<void> = Promise.resolve();
  private listeners: Listener[] = [];

  constructor(private readonly service: ExplorerService, tree: TreeDocument) {
    this.tree = tree;
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  /** Serialize actions: each runs only after the previous one settles. */
  private enqueue(action: () => Promise<void>): Promise<void> {
    this.queue = this.queue.then(async () => {
      this.lastError = null;
      try {
        await action();
      } catch (err) {
        if (err instanceof ApiError) {
          this.lastError = { code: err.code, message: err.message };
        } else {
          this.lastError = { code: "client-error", message: String(err) };
        }
      }
      this.notify();
    });
    return this.queue;
  }

  selectNode(nodeId: number | null): Promise<void> {
    return this.enqueue(async () => {
      if (nodeId === null) {
        this.selected = null;
        this.highlighted = [];
        return;
      }
      this.highlighted = await this.service.members(nodeId);
      this.selected = nodeId;
    });
  }

  /** Live level cut from the mass slider. */
  setMass(mass: number): Promise<void> {
    return this.enqueue(async () => {
      this.labeling = await this.service.cluster("cut", {
        level: mass,
        scale: "mass",
      });
      this.mass = mass;
      this.method = "cut";
    });
  }

  /** Method switcher: leaf or first-k clustering. */
  setMethod(method: "leaf" | "first-k", k?: number): Promise<void> {
    return this.enqueue(async () => {
      const params: Record<string, unknown> = {};
      if (method === "first-k") {
        params["K"] = k;
      }
      this.labeling = await this.service.cluster(method, params);
      this.method = method;
      this.k = method === "first-k" ? (k ?? null) : null;
      this.mass = null;
    });
  }

  /** Switching the vertical scale re-indexes the dendrogram only; the
   * selected branch is preserved. */
  toggleScale(): void {
    this.scale = this.scale === "mass" ? "density" : "mass";
    this.notify();
  }

  /** Per-item color from the current labeling (background gray). */
  itemColors(): string[] {
    const colors = new Array<string>(this.tree.n).fill(BACKGROUND_COLOR);
    if (this.labeling) {
      this.labeling.labels.forEach((label, i) => {
        if (label !== null) colors[i] = nodeColor(label);
      });
    }
    return colors;
  }

  /** Distinct foreground colors currently on screen. */
  distinctColors(): Set<string> {
    const out = new Set<string>();
    if (this.labeling) {
      for (const label of this.labeling.labels) {
        if (label !== null) out.add(nodeColor(label));
      }
    }
    return out;
  }

  viewState(): ViewState {
    return {
      scale: this.scale,
      selected: this.selected,
      mass: this.mass,
      method: this.method,
      k: this.k,
    };
  }

  toQuery(): string {
    const params = new URLSearchParams();
    params.set("scale", this.scale);
    if (this.selected !== null) params.set("node", String(this.selected));
    if (this.mass !== null) params.set("mass", String(this.mass));
    if (this.method !== null) params.set("method", this.method);
    if (this.k !== null) params.set("k", String(this.k));
    return params.toString();
  }

  /** Replay a deep link: restores scale, selection and labeling. */
  async applyQuery(query: string): Promise<void> {
    const params = new URLSearchParams(query);
    const scale = params.get("scale");
    if (scale === "mass" || scale === "density") {
      this.scale = scale;
    }
    const method = params.get("method");
    const mass = params.get("mass");
    if (method === "cut" && mass !== null) {
      await this.setMass(Number(mass));
    } else if (method === "leaf") {
      await this.setMethod("leaf");
    } else if (method === "first-k") {
      await this.setMethod("first-k", Number(params.get("k") ?? "1"));
    }
    const node = params.get("node");
    if (node !== null) {
      await this.selectNode(Number(node));
    }
    this.notify();
  }
}
