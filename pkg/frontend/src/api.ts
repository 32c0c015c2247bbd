// Thin typed client over the session API. Every method returns the parsed
// body or throws ApiError carrying the server's message and diagnostics.

import type {
  Diagnostic,
  GraphDocument,
  LatticeArtifact,
  LatticeSummary,
  OverviewPayload,
  ResultsPayload,
  StatusMap,
  TranslatePayload,
} from "./types.js";

export class ApiError extends Error {
  status: number;
  diagnostics: Diagnostic[];

  constructor(status: number, message: string, diagnostics: Diagnostic[] = []) {
    super(message);
    this.status = status;
    this.diagnostics = diagnostics;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class Client {
  private base: string;
  private fetcher: FetchLike;

  constructor(base = "", fetcher: FetchLike = (...args) => fetch(...args)) {
    this.base = base.replace(/\/$/, "");
    this.fetcher = fetcher;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "content-type": "application/json" } };
    if (body !== undefined) init.body = JSON.stringify(body);
    const resp = await this.fetcher(`${this.base}${path}`, init);
    const payload = await resp.json().catch(() => ({}));
    if (!resp.ok) {
      throw new ApiError(resp.status, payload.error ?? resp.statusText, payload.diagnostics ?? []);
    }
    return payload as T;
  }

  async createSession(): Promise<string> {
    const out = await this.request<{ session: string }>("POST", "/api/session");
    return out.session;
  }

  loadGraph(sid: string, doc: GraphDocument) {
    return this.request<{ directed: boolean; nodes: number; edges: number }>(
      "POST", `/api/session/${sid}/graph`, doc);
  }

  putQuery(sid: string, dsl: string) {
    return this.request<{ diagnostics: Diagnostic[]; lattice: LatticeSummary }>(
      "PUT", `/api/session/${sid}/query`, { dsl });
  }

  lattice(sid: string) {
    return this.request<LatticeArtifact>("GET", `/api/session/${sid}/lattice`);
  }

  execute(sid: string, step: string, limit: number) {
    return this.request<{ statuses: StatusMap }>(
      "POST", `/api/session/${sid}/execute`, { step, limit });
  }

  results(sid: string, instance: string) {
    return this.request<ResultsPayload>(
      "GET", `/api/session/${sid}/results/${encodeURIComponent(instance)}`);
  }

  overview(sid: string, instances: string[]) {
    const q = encodeURIComponent(instances.join(","));
    return this.request<OverviewPayload>("GET", `/api/session/${sid}/overview?instances=${q}`);
  }

  translate(sid: string, instance: string, limit?: number) {
    const suffix = limit === undefined ? "" : `?limit=${limit}`;
    return this.request<TranslatePayload>(
      "GET", `/api/session/${sid}/translate/${encodeURIComponent(instance)}${suffix}`);
  }
}
