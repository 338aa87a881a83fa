import { describe, expect, it } from "vitest";

import { decodeMembers } from "../src/api";
import { chooseStride, MAX_RENDERED_POINTS } from "../src/scatter";

describe("member decoding", () => {
  it("passes plain lists through", () => {
    expect(
      decodeMembers({ node: 1, encoding: "list", count: 3, indices: [4, 7, 9] }),
    ).toEqual([4, 7, 9]);
  });

  it("expands run-length-encoded ranges", () => {
    const decoded = decodeMembers({
      node: 1,
      encoding: "ranges",
      count: 7,
      ranges: [
        [0, 5],
        [10, 12],
      ],
    });
    expect(decoded).toEqual([0, 1, 2, 3, 4, 10, 11]);
  });
});

describe("client-side decimation", () => {
  it("caps rendered points at the budget", () => {
    expect(chooseStride(100)).toBe(1);
    expect(chooseStride(MAX_RENDERED_POINTS)).toBe(1);
    const big = 51_126;
    const stride = chooseStride(big);
    expect(Math.ceil(big / stride)).toBeLessThanOrEqual(MAX_RENDERED_POINTS);
    expect(stride).toBe(2);
  });
});
