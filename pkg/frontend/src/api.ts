/**
 * Typed client for the corpus service. Every request goes through one
 * helper and is appended to `log`, which the contract tests scan to prove
 * the UI only ever issues documented /api/* requests.
 */

import type { DocDetail, Filters, Point, RelatedDoc, SearchHit, TermSuggestion } from "./types.js";

const PAGE_SIZE = 500;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

interface Page<T> {
  items: T[];
  total: number;
}

export class ApiClient {
  readonly log: string[] = [];

  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async get<T>(path: string, signal?: AbortSignal): Promise<{ body: T; total: number }> {
    this.log.push(path);
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, { signal });
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") throw err;
      throw new ApiError(0, "network_error", `request failed: ${String(err)}`);
    }
    if (!response.ok) {
      let code = "http_error";
      let message = `HTTP ${response.status}`;
      try {
        const payload = (await response.json()) as { error?: { code: string; message: string } };
        if (payload.error) {
          code = payload.error.code;
          message = payload.error.message;
        }
      } catch {
        // non-JSON error body; keep the generic message
      }
      throw new ApiError(response.status, code, message);
    }
    const total = Number(response.headers.get("X-Total-Count") ?? "0");
    return { body: (await response.json()) as T, total };
  }

  private async getPaged<T>(
    basePath: string,
    params: URLSearchParams,
    signal?: AbortSignal,
  ): Promise<T[]> {
    const items: T[] = [];
    let offset = 0;
    for (;;) {
      const page = new URLSearchParams(params);
      page.set("offset", String(offset));
      page.set("limit", String(PAGE_SIZE));
      const { body, total } = await this.get<T[]>(`${basePath}?${page}`, signal);
      items.push(...body);
      offset += PAGE_SIZE;
      if (body.length === 0 || items.length >= total || offset >= total) break;
    }
    return items;
  }

  /** All scatter points, paged through transparently. Filters are server-side. */
  points(filters?: Filters, signal?: AbortSignal): Promise<Point[]> {
    const params = new URLSearchParams();
    for (const venue of filters?.venues ?? []) params.append("venue", venue);
    if (filters?.yearFrom != null) params.set("year_from", String(filters.yearFrom));
    if (filters?.yearTo != null) params.set("year_to", String(filters.yearTo));
    return this.getPaged<Point>("/api/points", params, signal);
  }

  async doc(docId: string, signal?: AbortSignal): Promise<DocDetail> {
    return (await this.get<DocDetail>(`/api/doc/${encodeURIComponent(docId)}`, signal)).body;
  }

  async related(docId: string, k = 10, signal?: AbortSignal): Promise<RelatedDoc[]> {
    const path = `/api/doc/${encodeURIComponent(docId)}/related?k=${k}`;
    return (await this.get<RelatedDoc[]>(path, signal)).body;
  }

  async terms(docId: string, k = 10, m = 8, signal?: AbortSignal): Promise<TermSuggestion[]> {
    const path = `/api/doc/${encodeURIComponent(docId)}/terms?k=${k}&m=${m}`;
    return (await this.get<TermSuggestion[]>(path, signal)).body;
  }

  search(query: string, signal?: AbortSignal): Promise<SearchHit[]> {
    const params = new URLSearchParams({ q: query });
    return this.getPaged<SearchHit>("/api/search", params, signal);
  }
}
