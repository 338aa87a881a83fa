import { describe, expect, it } from "vitest";

import { layoutDendrogram } from "../src/layout";
import { demoTree } from "./fixture";

describe("dendrogram layout", () => {
  it("spans follow the selected scale", () => {
    const byMass = layoutDendrogram(demoTree(), "mass");
    const byLevel = layoutDendrogram(demoTree(), "density");
    const root = byMass.segments.find((s) => s.id === 0)!;
    expect([root.y0, root.y1]).toEqual([0.0, 0.021]);
    const rootLevel = byLevel.segments.find((s) => s.id === 0)!;
    expect([rootLevel.y0, rootLevel.y1]).toEqual([0.0, 0.005]);
    // topology identical on both scales
    expect(byMass.segments.map((s) => s.id).sort()).toEqual(
      byLevel.segments.map((s) => s.id).sort(),
    );
  });

  it("larger siblings sit to the left", () => {
    const layout = layoutDendrogram(demoTree(), "mass");
    const x = new Map(layout.segments.map((s) => [s.id, s.x]));
    expect(x.get(1)!).toBeLessThan(x.get(2)!); // 1309 vs 649
    expect(x.get(3)!).toBeLessThan(x.get(4)!); // 359 vs 295
  });

  it("thickness is monotone in node size", () => {
    const layout = layoutDendrogram(demoTree(), "mass");
    const ordered = [...layout.segments].sort((a, b) => a.size - b.size);
    for (let i = 1; i < ordered.length; i++) {
      expect(ordered[i].thickness).toBeGreaterThanOrEqual(
        ordered[i - 1].thickness,
      );
    }
  });

  it("sibling segments never overlap horizontally", () => {
    const layout = layoutDendrogram(demoTree(), "mass");
    const xs = layout.segments.map((s) => s.x);
    expect(new Set(xs).size).toBe(xs.length);
  });

  it("connectors sit at the parent's split value", () => {
    const layout = layoutDendrogram(demoTree(), "mass");
    for (const conn of layout.connectors) {
      const parent = demoTree().nodes.find((n) => n.id === conn.parent)!;
      expect(conn.y).toBe(parent.end_mass);
    }
  });
});
