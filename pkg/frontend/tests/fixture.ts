/** The shipped 5-node demo tree, mirrored from the service fixture. */

import type { TreeDocument, TreeNodeRow } from "../src/types";

function range(start: number, stop: number): number[] {
  const out: number[] = [];
  for (let i = start; i < stop; i++) out.push(i);
  return out;
}

function node(
  id: number,
  start_level: number,
  end_level: number,
  start_mass: number,
  end_mass: number,
  members: number[],
  parent: number | null,
  children: number[],
): TreeNodeRow {
  return {
    id,
    start_level,
    end_level,
    start_mass,
    end_mass,
    size: members.length,
    parent,
    children,
    members,
  };
}

export function demoTree(): TreeDocument {
  return {
    format_version: 1,
    n: 2001,
    k: 100,
    gamma: 0.05,
    density_values: null,
    nodes: [
      node(0, 0.0, 0.005, 0.0, 0.021, range(0, 2001), null, [1, 2]),
      node(1, 0.005, 0.061, 0.021, 0.528, range(0, 1309), 0, [3, 4]),
      node(2, 0.005, 0.165, 0.021, 0.998, range(1309, 1958), 0, []),
      node(3, 0.061, 0.167, 0.528, 0.999, range(0, 359), 1, []),
      node(4, 0.061, 0.172, 0.528, 0.999, range(359, 654), 1, []),
    ],
  };
}
