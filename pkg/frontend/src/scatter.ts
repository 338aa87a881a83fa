/** Linked scatter view: orbit-controlled WebGL for 3-D data, a plain
 * canvas with an axis-pair selector otherwise. Points are capped at 50k
 * rendered; the stride is chosen client-side.
 */

import * as THREE from "three";
import { OrbitControls } from "three/examples/jsm/controls/OrbitControls.js";
import { BACKGROUND_COLOR, HIGHLIGHT_COLOR } from "./colors";
import type { ExplorerState } from "./state";
import type { PointsResponse } from "./types";

export const MAX_RENDERED_POINTS = 50_000;

export function chooseStride(n: number): number {
  return Math.max(1, Math.ceil(n / MAX_RENDERED_POINTS));
}

function colorsFor(state: ExplorerState, indices: number[]): string[] {
  const all = state.itemColors();
  const highlighted = new Set(state.highlighted);
  return indices.map((i) =>
    highlighted.has(i) ? HIGHLIGHT_COLOR : state.selected !== null ? BACKGROUND_COLOR : all[i],
  );
}

export class Scatter3D {
  private readonly renderer: THREE.WebGLRenderer;
  private readonly scene = new THREE.Scene();
  private readonly camera: THREE.PerspectiveCamera;
  private geometry: THREE.BufferGeometry | null = null;

  constructor(
    canvas: HTMLCanvasElement,
    private readonly state: ExplorerState,
    private readonly points: PointsResponse,
  ) {
    this.renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
    this.renderer.setSize(canvas.clientWidth, canvas.clientHeight, false);
    this.scene.background = new THREE.Color("#ffffff");
    this.camera = new THREE.PerspectiveCamera(
      50,
      canvas.clientWidth / canvas.clientHeight,
      0.1,
      10_000,
    );
    const controls = new OrbitControls(this.camera, canvas);
    const bounds = new THREE.Box3();
    for (const row of points.coordinates) {
      bounds.expandByPoint(new THREE.Vector3(row[0], row[1], row[2] ?? 0));
    }
    const center = bounds.getCenter(new THREE.Vector3());
    const span = bounds.getSize(new THREE.Vector3()).length() || 1;
    this.camera.position.copy(center).add(new THREE.Vector3(0, 0, span * 1.2));
    controls.target.copy(center);
    controls.update();

    this.buildPoints();
    state.subscribe(() => this.recolor());
    const animate = () => {
      requestAnimationFrame(animate);
      controls.update();
      this.renderer.render(this.scene, this.camera);
    };
    animate();
  }

  private buildPoints(): void {
    const coords = this.points.coordinates;
    const positions = new Float32Array(coords.length * 3);
    coords.forEach((row, i) => {
      positions[3 * i] = row[0];
      positions[3 * i + 1] = row[1];
      positions[3 * i + 2] = row[2] ?? 0;
    });
    this.geometry = new THREE.BufferGeometry();
    this.geometry.setAttribute("position", new THREE.BufferAttribute(positions, 3));
    this.geometry.setAttribute(
      "color",
      new THREE.BufferAttribute(new Float32Array(coords.length * 3), 3),
    );
    const material = new THREE.PointsMaterial({ size: 2.2, vertexColors: true, sizeAttenuation: false });
    this.scene.add(new THREE.Points(this.geometry, material));
    this.recolor();
  }

  private recolor(): void {
    if (!this.geometry) return;
    const attr = this.geometry.getAttribute("color") as THREE.BufferAttribute;
    const css = colorsFor(this.state, this.points.indices);
    const scratch = new THREE.Color();
    css.forEach((c, i) => {
      scratch.set(c);
      attr.setXYZ(i, scratch.r, scratch.g, scratch.b);
    });
    attr.needsUpdate = true;
  }
}

export class Scatter2D {
  private axes: [number, number] = [0, 1];

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private readonly state: ExplorerState,
    private readonly points: PointsResponse,
    private readonly dim: number,
  ) {
    state.subscribe(() => this.render());
    this.render();
  }

  setAxes(a: number, b: number): void {
    this.axes = [a, b];
    this.render();
  }

  get dimensions(): number {
    return this.dim;
  }

  render(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);
    const [ax, ay] = this.axes;
    const xs = this.points.coordinates.map((row) => row[ax] ?? 0);
    const ys = this.points.coordinates.map((row) => row[ay] ?? 0);
    const xMin = Math.min(...xs), xMax = Math.max(...xs);
    const yMin = Math.min(...ys), yMax = Math.max(...ys);
    const pad = 12;
    const sx = (x: number) => pad + ((x - xMin) / (xMax - xMin || 1)) * (width - 2 * pad);
    const sy = (y: number) => height - pad - ((y - yMin) / (yMax - yMin || 1)) * (height - 2 * pad);
    const colors = colorsFor(this.state, this.points.indices);
    for (let i = 0; i < xs.length; i++) {
      ctx.fillStyle = colors[i];
      ctx.fillRect(sx(xs[i]) - 1.5, sy(ys[i]) - 1.5, 3, 3);
    }
  }
}
