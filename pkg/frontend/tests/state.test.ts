import { describe, expect, it } from "vitest";

import { ExplorerState } from "../src/state";
import { demoTree } from "./fixture";
import { MockService } from "./mock";

function freshState(service = new MockService(demoTree())) {
  return { service, state: new ExplorerState(service, demoTree()) };
}

describe("explorer round trip on the demo tree", () => {
  it("selecting branch 1 highlights exactly 1309 points", async () => {
    const { state } = freshState();
    await state.selectNode(1);
    expect(state.selected).toBe(1);
    expect(state.highlighted.length).toBe(1309);
  });

  it("mass slider at 0.60 shows exactly 3 colors", async () => {
    const { state } = freshState();
    await state.setMass(0.6);
    expect(state.distinctColors().size).toBe(3);
    const ids = new Set(state.labeling!.labels.filter((l) => l !== null));
    expect(ids).toEqual(new Set([2, 3, 4]));
  });

  it("scale toggle preserves the selected branch", async () => {
    const { state } = freshState();
    await state.selectNode(1);
    expect(state.scale).toBe("mass");
    state.toggleScale();
    expect(state.scale).toBe("density");
    expect(state.selected).toBe(1);
    expect(state.highlighted.length).toBe(1309);
    state.toggleScale();
    expect(state.scale).toBe("mass");
    expect(state.selected).toBe(1);
  });
});

describe("slider and method panel", () => {
  it("mass 0.30 gives two clusters, mass 0 one per root", async () => {
    const { state } = freshState();
    await state.setMass(0.3);
    expect(state.distinctColors().size).toBe(2);
    await state.setMass(0);
    expect(state.distinctColors().size).toBe(1);
  });

  it("leaf method colors the three leaves", async () => {
    const { state } = freshState();
    await state.setMethod("leaf");
    expect(state.distinctColors().size).toBe(3);
  });

  it("colors are stable for a node id across actions", async () => {
    const { state } = freshState();
    await state.setMass(0.6);
    const before = new Map<number, string>();
    state.labeling!.labels.forEach((label, i) => {
      if (label !== null) before.set(i, state.itemColors()[i]);
    });
    await state.setMethod("leaf");
    await state.setMass(0.6);
    state.labeling!.labels.forEach((label, i) => {
      if (label !== null) expect(state.itemColors()[i]).toBe(before.get(i));
    });
  });

  it("unachievable K surfaces the machine-readable code", async () => {
    const { state } = freshState();
    await state.setMethod("first-k", 4);
    expect(state.lastError?.code).toBe("unachievable-k");
    await state.setMethod("first-k", 3);
    expect(state.lastError).toBeNull();
    expect(state.distinctColors().size).toBe(3);
  });
});

describe("request serialization", () => {
  it("overlapping actions run one at a time, last one wins", async () => {
    const service = new MockService(demoTree());
    service.delayMs = 5;
    const state = new ExplorerState(service, demoTree());
    const a = state.setMass(0.3);
    const b = state.setMass(0.6);
    const c = state.selectNode(2);
    await Promise.all([a, b, c]);
    const clusterCalls = service.calls.filter((c) => c.startsWith("cluster"));
    expect(clusterCalls).toEqual([
      'cluster:cut:{"level":0.3,"scale":"mass"}',
      'cluster:cut:{"level":0.6,"scale":"mass"}',
    ]);
    expect(state.mass).toBe(0.6);
    expect(state.selected).toBe(2);
  });
});

describe("deep links", () => {
  it("view state round-trips through the query string", async () => {
    const { state } = freshState();
    await state.setMass(0.6);
    await state.selectNode(1);
    state.toggleScale();
    const query = state.toQuery();

    const { state: restored } = freshState();
    await restored.applyQuery(query);
    expect(restored.viewState()).toEqual(state.viewState());
    expect(restored.highlighted.length).toBe(1309);
    expect(restored.distinctColors().size).toBe(3);
  });

  it("first-k deep link restores the labeling", async () => {
    const { state } = freshState();
    await state.setMethod("first-k", 2);
    const { state: restored } = freshState();
    await restored.applyQuery(state.toQuery());
    expect(restored.method).toBe("first-k");
    expect(restored.k).toBe(2);
    expect(restored.distinctColors().size).toBe(2);
  });
});
