/** Typed client for the five read-only server endpoints.
 *
 * The fetch function is injectable so tests can count or fail requests;
 * nothing else in the dashboard talks to the network.
 */

export type Cell = number | null;

export interface Meta {
  kind: "meta";
  granularity: "monthly" | "daily";
  periods: { first: string; last: string; count: number };
  regions: string[];
  indicators: { id: string; name: string; unit: string }[];
  tracks: { name: string; indicator: string }[];
  provenance: string;
  hashes: { summary: string; chunks: Record<string, string> };
}

export interface Summary {
  kind: "summary";
  n_periods: number;
  regions: string[];
  tracks: { name: string; values: Cell[][] }[];
}

export interface DetailChunk {
  kind: "chunk";
  region: string;
  series: Record<string, Cell[]>;
}

export type FrameAssignment = Record<string, string>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    detail: string,
  ) {
    super(`${code}: ${detail}`);
  }
}

async function raiseFor(response: Response): Promise<never> {
  let code = "HttpError";
  let detail = `${response.status}`;
  try {
    const body = (await response.json()) as { error?: string; detail?: string };
    if (body.error) code = body.error;
    if (body.detail) detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, code, detail);
}

export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async json<T>(path: string): Promise<T> {
    const response = await this.fetchFn(`${this.base}${path}`);
    if (!response.ok) await raiseFor(response);
    return (await response.json()) as T;
  }

  meta(): Promise<Meta> {
    return this.json<Meta>("/api/meta");
  }

  summary(): Promise<Summary> {
    return this.json<Summary>("/api/summary");
  }

  detail(region: string): Promise<DetailChunk> {
    return this.json<DetailChunk>(`/api/detail/${encodeURIComponent(region)}`);
  }

  frame(ordinal: number, track?: string, scale?: string): Promise<FrameAssignment> {
    const query = new URLSearchParams();
    if (track !== undefined) query.set("track", track);
    if (scale !== undefined) query.set("scale", scale);
    const suffix = query.size > 0 ? `?${query.toString()}` : "";
    return this.json<FrameAssignment>(`/api/frame/${ordinal}${suffix}`);
  }

  async mapSvg(): Promise<string> {
    const response = await this.fetchFn(`${this.base}/api/map`);
    if (!response.ok) await raiseFor(response);
    return await response.text();
  }
}
