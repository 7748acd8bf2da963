/** Thin typed client over the service JSON contracts.
 *
 * In-flight GETs are de-duplicated by URL so repeated renders share one
 * request; responses report whether the service answered from its
 * persisted cache (X-Cache-Hit header).
 */

import type {
  ApiErrorBody,
  EvaluateResponse,
  RecommendationPayload,
  SchemaDoc,
  SessionDoc,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export interface RecommendationResult {
  payload: RecommendationPayload;
  cacheHit: boolean;
  elapsedMs: number;
}

export interface SessionRequest {
  query: string;
  results: string[] | string;
  alignment?: string;
  config?: Record<string, unknown>;
}

async function parseError(res: Response): Promise<ApiError> {
  let body: ApiErrorBody = { code: "unknown", message: res.statusText };
  try {
    body = (await res.json()) as ApiErrorBody;
  } catch {
    // non-JSON error body: keep the status text
  }
  return new ApiError(res.status, body.code, body.message);
}

export class ApiClient {
  private inflight = new Map<string, Promise<Response>>();

  constructor(
    private baseUrl: string = "",
    private fetchFn: typeof fetch = fetch,
  ) {}

  private dedupedGet(url: string): Promise<Response> {
    let pending = this.inflight.get(url);
    if (!pending) {
      pending = this.fetchFn(this.baseUrl + url).finally(() => this.inflight.delete(url));
      this.inflight.set(url, pending);
    }
    // each caller reads its own clone so the shared body is never consumed twice
    return pending.then((res) => res.clone());
  }

  private async post(url: string, body: unknown): Promise<Response> {
    return this.fetchFn(this.baseUrl + url, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async createSession(req: SessionRequest): Promise<SessionDoc> {
    const res = await this.post("/sessions", req);
    if (res.status !== 201) throw await parseError(res);
    return (await res.json()) as SessionDoc;
  }

  async getSchema(sessionId: string): Promise<SchemaDoc> {
    const res = await this.dedupedGet(`/sessions/${sessionId}/schema`);
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as SchemaDoc;
  }

  async getRecommendations(
    sessionId: string,
    params: { n?: number; strategy?: string; prune?: boolean } = {},
  ): Promise<RecommendationResult> {
    const qs = new URLSearchParams();
    if (params.n !== undefined) qs.set("n", String(params.n));
    if (params.strategy !== undefined) qs.set("strategy", params.strategy);
    if (params.prune !== undefined) qs.set("prune", String(params.prune));
    const suffix = qs.toString() ? `?${qs.toString()}` : "";
    const start = Date.now();
    const res = await this.dedupedGet(`/sessions/${sessionId}/recommendations${suffix}`);
    if (!res.ok) throw await parseError(res);
    return {
      payload: (await res.json()) as RecommendationPayload,
      cacheHit: res.headers.get("x-cache-hit") === "true",
      elapsedMs: Date.now() - start,
    };
  }

  async evaluatePlan(
    sessionId: string,
    plan: { A: string; M: string; F: string },
  ): Promise<EvaluateResponse> {
    const res = await this.post(`/sessions/${sessionId}/plans/evaluate`, plan);
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as EvaluateResponse;
  }
}
