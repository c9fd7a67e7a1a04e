import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("ApiClient", () => {
  it("builds verdict posts and returns parsed bodies", async () => {
    const calls: Array<{ url: string; init?: RequestInit }> = [];
    const api = new ApiClient("", async (url, init) => {
      calls.push({ url, init });
      return jsonResponse({ status: "recorded" });
    });
    const out = await api.postVerdict("a", "b", "equivalent", "tester");
    expect(out).toEqual({ status: "recorded" });
    expect(calls[0].url).toBe("/api/verdicts");
    expect(JSON.parse(String(calls[0].init?.body))).toEqual({
      i: "a", j: "b", value: "equivalent", source: "tester",
    });
  });

  it("url-encodes pair ids in the detail path", async () => {
    let seen = "";
    const api = new ApiClient("", async (url) => {
      seen = url;
      return jsonResponse({});
    });
    await api.pairDetail("a/x", "b c");
    expect(seen).toBe("/api/pairs/a%2Fx/b%20c");
  });

  it("raises ApiError with the service detail message", async () => {
    const api = new ApiClient("", async () =>
      jsonResponse({ detail: "UnknownPair: ('a', 'zz') is not in the sample" }, 409));
    await expect(api.postVerdict("a", "zz", "equivalent")).rejects.toMatchObject({
      status: 409,
      detail: expect.stringContaining("UnknownPair"),
    });
  });

  it("sends slice queries with filters and group_by", async () => {
    let body: unknown;
    const api = new ApiClient("http://x", async (url, init) => {
      expect(url).toBe("http://x/api/slices/query");
      body = JSON.parse(String(init?.body));
      return jsonResponse({ groups: [], total_contribution: 0, total_draws: 0,
                            attribute_keys: [] });
    });
    await api.slice([{ key: "class", op: "eq", value: "split" }], "i_kind");
    expect(body).toEqual({
      filters: [{ key: "class", op: "eq", value: "split" }],
      group_by: "i_kind",
    });
  });

  it("keeps the status text when the error body is not JSON", async () => {
    const api = new ApiClient("", async () =>
      new Response("boom", { status: 500, statusText: "Internal Server Error" }));
    await expect(api.overview()).rejects.toBeInstanceOf(ApiError);
  });
});
