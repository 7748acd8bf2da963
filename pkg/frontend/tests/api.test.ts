import { describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import recommendationsFixture from "./fixtures/recommendations.json";

function jsonResponse(
  body: unknown,
  init: { status?: number; headers?: Record<string, string> } = {},
): Response {
  return new Response(JSON.stringify(body), {
    status: init.status ?? 200,
    headers: { "Content-Type": "application/json", ...init.headers },
  });
}

describe("api client", () => {
  it("de-duplicates concurrent GETs to the same URL", async () => {
    let release!: () => void;
    const gate = new Promise<void>((r) => (release = r));
    const fetchFn = vi.fn(async () => {
      await gate;
      return jsonResponse({ query: {}, results: [], alignment: [] });
    });
    const api = new ApiClient("", fetchFn as unknown as typeof fetch);
    const first = api.getSchema("s1");
    const second = api.getSchema("s1");
    release();
    await Promise.all([first, second]);
    expect(fetchFn).toHaveBeenCalledTimes(1);
  });

  it("issues a fresh request once the previous one settled", async () => {
    const fetchFn = vi.fn(async () => jsonResponse({ query: {}, results: [], alignment: [] }));
    const api = new ApiClient("", fetchFn as unknown as typeof fetch);
    await api.getSchema("s1");
    await api.getSchema("s1");
    expect(fetchFn).toHaveBeenCalledTimes(2);
  });

  it("does not merge requests for different sessions", async () => {
    const fetchFn = vi.fn(async () => jsonResponse({ query: {}, results: [], alignment: [] }));
    const api = new ApiClient("", fetchFn as unknown as typeof fetch);
    await Promise.all([api.getSchema("s1"), api.getSchema("s2")]);
    expect(fetchFn).toHaveBeenCalledTimes(2);
  });

  it("reports the service cache flag from the response header", async () => {
    const fetchFn = vi.fn(async () =>
      jsonResponse(recommendationsFixture, { headers: { "X-Cache-Hit": "true" } }),
    );
    const api = new ApiClient("", fetchFn as unknown as typeof fetch);
    const res = await api.getRecommendations("s1", { n: 5 });
    expect(res.cacheHit).toBe(true);
    expect(res.payload.plans.length).toBe(recommendationsFixture.plans.length);
    expect(fetchFn).toHaveBeenCalledWith("/sessions/s1/recommendations?n=5");
  });

  it("turns structured error bodies into ApiError", async () => {
    const fetchFn = vi.fn(async () =>
      jsonResponse({ code: "unknown_session", message: "no such session" }, { status: 404 }),
    );
    const api = new ApiClient("", fetchFn as unknown as typeof fetch);
    const err = await api.getSchema("nope").catch((e) => e as ApiError);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(404);
    expect(err.code).toBe("unknown_session");
    expect(err.message).toBe("no such session");
  });

  it("survives non-JSON error bodies", async () => {
    const fetchFn = vi.fn(
      async () => new Response("boom", { status: 500, statusText: "Internal Server Error" }),
    );
    const api = new ApiClient("", fetchFn as unknown as typeof fetch);
    const err = await api.getSchema("s1").catch((e) => e as ApiError);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(500);
    expect(err.code).toBe("unknown");
  });

  it("rejects session creation that does not return 201", async () => {
    const fetchFn = vi.fn(async () =>
      jsonResponse({ code: "io_error", message: "missing file" }, { status: 400 }),
    );
    const api = new ApiClient("", fetchFn as unknown as typeof fetch);
    const err = await api
      .createSession({ query: "q.csv", results: ["r.csv"] })
      .catch((e) => e as ApiError);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.code).toBe("io_error");
  });
});
