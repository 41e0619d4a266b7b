import { readFileSync } from "node:fs";
import { resolve } from "node:path";

export interface RecordedEntry {
  method: string;
  path: string;
  status: number;
  headers: Record<string, string>;
  body: unknown;
}

export interface Recording {
  clicked_doc: string;
  entries: RecordedEntry[];
}

export function loadRecording(): Recording {
  const path = resolve(process.cwd(), "tests", "fixtures", "api-recording.json");
  return JSON.parse(readFileSync(path, "utf8")) as Recording;
}

function splitUrl(url: string): { pathname: string; params: string } {
  const q = url.indexOf("?");
  const pathname = q === -1 ? url : url.slice(0, q);
  const params = new URLSearchParams(q === -1 ? "" : url.slice(q + 1));
  params.sort();
  return { pathname, params: params.toString() };
}

/** fetch stub resolving requests against the recorded service traffic. */
export function fixtureFetch(recording: Recording): typeof fetch {
  return async (input: RequestInfo | URL): Promise<Response> => {
    const url = String(input);
    const want = splitUrl(url);
    for (const entry of recording.entries) {
      const have = splitUrl(entry.path);
      if (have.pathname === want.pathname && have.params === want.params) {
        return new Response(JSON.stringify(entry.body), {
          status: entry.status,
          headers: { "Content-Type": "application/json", ...entry.headers },
        });
      }
    }
    throw new Error(`no recorded response for ${url}`);
  };
}

/** Minimal recording 2D context; counts the batched draw calls. */
export function fakeContext(): {
  ctx: CanvasRenderingContext2D;
  counters: { fillRect: number; clearRect: number; fillStyles: string[] };
} {
  const counters = { fillRect: 0, clearRect: 0, fillStyles: [] as string[] };
  const target = {
    set fillStyle(value: string) {
      counters.fillStyles.push(value);
    },
    fillRect: () => {
      counters.fillRect += 1;
    },
    clearRect: () => {
      counters.clearRect += 1;
    },
  };
  return { ctx: target as unknown as CanvasRenderingContext2D, counters };
}

export const DOCUMENTED_ENDPOINTS = [
  /^\/api\/points(\?|$)/,
  /^\/api\/doc\/[^/?]+$/,
  /^\/api\/doc\/[^/?]+\/related(\?|$)/,
  /^\/api\/doc\/[^/?]+\/terms(\?|$)/,
  /^\/api\/search\?/,
  /^\/api\/matrix(\?|$)/,
  /^\/api\/drift\?/,
];

export function assertOnlyDocumentedRequests(log: string[]): void {
  for (const path of log) {
    if (!DOCUMENTED_ENDPOINTS.some((pattern) => pattern.test(path))) {
      throw new Error(`undocumented request issued: ${path}`);
    }
  }
}

export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
