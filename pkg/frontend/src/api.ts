/** Typed client over the service endpoints.
 *
 * Every response is recorded in `log` so displayed data can be traced back
 * to a service payload: the UI itself never derives nodes, edges or scores.
 */

import type {
  GraphSummary,
  NodeFilterBody,
  NodeRecord,
  RetrieveResponse,
  Subgraph,
} from "./types.js";

export interface LogEntry {
  method: string;
  path: string;
  body?: unknown;
  response: unknown;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  readonly log: LogEntry[] = [];

  constructor(
    private baseUrl: string,
    private fetchImpl: typeof fetch = fetch,
  ) {}

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload: unknown = await response.json();
    if (!response.ok) {
      const err = payload as { code?: string; message?: string };
      throw new ApiError(response.status, err.code ?? "Internal", err.message ?? "error");
    }
    this.log.push({ method, path, body, response: payload });
    return payload as T;
  }

  summary(): Promise<GraphSummary> {
    return this.call("GET", "/graph/summary");
  }

  nodes(params: URLSearchParams): Promise<{ nodes: NodeRecord[] }> {
    const qs = params.toString();
    return this.call("GET", `/nodes${qs ? "?" + qs : ""}`);
  }

  neighbors(id: string, hops = 1): Promise<Subgraph> {
    return this.call(
      "GET",
      `/neighbors?id=${encodeURIComponent(id)}&hops=${hops}`,
    );
  }

  query(filter: NodeFilterBody): Promise<Subgraph> {
    return this.call("POST", "/query", filter);
  }

  retrieve(query: string, k: number, hops: number): Promise<RetrieveResponse> {
    return this.call("POST", "/retrieve", { query, k, hops });
  }

  /** Ids of every node the service has sent so far (traceability check). */
  loggedNodeIds(): Set<string> {
    const ids = new Set<string>();
    for (const entry of this.log) {
      collectNodeIds(entry.response, ids);
    }
    return ids;
  }
}

function collectNodeIds(payload: unknown, into: Set<string>): void {
  if (payload === null || typeof payload !== "object") return;
  if (Array.isArray(payload)) {
    for (const item of payload) collectNodeIds(item, into);
    return;
  }
  const record = payload as Record<string, unknown>;
  if (record["kind"] === "node" && typeof record["id"] === "string") {
    into.add(record["id"]);
  }
  if (typeof record["node_id"] === "string") {
    into.add(record["node_id"]);
  }
  for (const value of Object.values(record)) collectNodeIds(value, into);
}
