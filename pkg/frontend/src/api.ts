/** HTTP client for the explorer service, plus member-list decoding. */

import type {
  LabelingDocument,
  MembersResponse,
  PointsResponse,
  ServiceError,
  TreeDocument,
} from "./types";

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(status: number, detail: ServiceError) {
    super(detail.message);
    this.code = detail.code;
    this.status = status;
  }
}

/** Expand a possibly run-length-encoded member response. */
export function decodeMembers(body: MembersResponse): number[] {
  if (body.encoding === "list") {
    return body.indices ?? [];
  }
  const out: number[] = [];
  for (const [start, stop] of body.ranges ?? []) {
    for (let i = start; i < stop; i++) {
      out.push(i);
    }
  }
  return out;
}

async function parse<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail: ServiceError = { code: "http-error", message: response.statusText };
    try {
      const body = await response.json();
      if (body && typeof body.detail === "object") detail = body.detail;
    } catch {
      // keep the generic detail
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

/** Minimal interface the UI needs; mocked in tests. */
export interface ExplorerService {
  tree(): Promise<TreeDocument>;
  points(stride: number): Promise<PointsResponse>;
  members(nodeId: number): Promise<number[]>;
  cluster(method: string, params: Record<string, unknown>): Promise<LabelingDocument>;
}

export class HttpService implements ExplorerService {
  constructor(private readonly base: string = "") {}

  async tree(): Promise<TreeDocument> {
    return parse(await fetch(`${this.base}/api/tree`));
  }

  async points(stride: number): Promise<PointsResponse> {
    return parse(await fetch(`${this.base}/api/points?stride=${stride}`));
  }

  async members(nodeId: number): Promise<number[]> {
    const body = await parse<MembersResponse>(
      await fetch(`${this.base}/api/node/${nodeId}/members`),
    );
    return decodeMembers(body);
  }

  async cluster(
    method: string,
    params: Record<string, unknown>,
  ): Promise<LabelingDocument> {
    return parse(
      await fetch(`${this.base}/api/cluster`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ method, params }),
      }),
    );
  }
}
