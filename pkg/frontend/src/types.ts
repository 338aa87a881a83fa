/** Wire types mirroring the service's JSON documents. */

export interface TreeNodeRow {
  id: number;
  start_level: number;
  end_level: number;
  start_mass: number;
  end_mass: number;
  size: number;
  parent: number | null;
  children: number[];
  members: number[];
}

export interface TreeDocument {
  format_version: number;
  n: number;
  k: number;
  gamma: number;
  density_values: number[] | null;
  nodes: TreeNodeRow[];
}

export interface LabelingDocument {
  format_version: number;
  method: string;
  params: Record<string, unknown>;
  labels: (number | null)[];
}

export interface MembersResponse {
  node: number;
  encoding: "list" | "ranges";
  count: number;
  indices?: number[];
  ranges?: [number, number][];
}

export interface PointsResponse {
  n: number;
  stride: number;
  indices: number[];
  coordinates: number[][];
  density: number[] | null;
}

export type Scale = "mass" | "density";

export interface ServiceError {
  code: string;
  message: string;
}
