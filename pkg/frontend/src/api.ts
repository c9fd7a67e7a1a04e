import type {
  Estimates,
  MetricRow,
  NextTask,
  Overview,
  PairDetail,
  SlicePredicate,
  SliceResult,
  VerdictValue,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function parseError(res: Response): Promise<ApiError> {
  let detail = res.statusText;
  try {
    const body = await res.json();
    detail = body.detail ?? body.error ?? JSON.stringify(body);
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(res.status, detail);
}

/** Thin typed client for the explore-service endpoints. */
export class ApiClient {
  constructor(
    private base: string = "",
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async get<T>(path: string): Promise<T> {
    const res = await this.fetchFn(this.base + path);
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const res = await this.fetchFn(this.base + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as T;
  }

  overview(): Promise<Overview> {
    return this.get("/api/overview");
  }

  exactMetrics(): Promise<{ rows: MetricRow[] }> {
    return this.get("/api/metrics/exact");
  }

  estimates(): Promise<Estimates> {
    return this.get("/api/estimates");
  }

  nextTask(): Promise<NextTask> {
    return this.get("/api/tasks/next");
  }

  postVerdict(i: string, j: string, value: VerdictValue, source = "ui"): Promise<unknown> {
    return this.post("/api/verdicts", { i, j, value, source });
  }

  pairDetail(i: string, j: string): Promise<PairDetail> {
    return this.get(
      `/api/pairs/${encodeURIComponent(i)}/${encodeURIComponent(j)}`,
    );
  }

  slice(filters: SlicePredicate[], groupBy: string | null): Promise<SliceResult> {
    return this.post("/api/slices/query", {
      filters,
      group_by: groupBy,
    });
  }
}
