/** Detail chunk cache: at most one request per region, ever.
 *
 * A second selection of an already requested region must not touch the
 * network, including while the first request is still in flight; the
 * in-flight promise is shared. Stale responses (the user moved on to a
 * different region) are still cached but callers check the current
 * selection before rendering.
 */

import type { ApiClient, DetailChunk } from "./api.js";

export class DetailLoader {
  private readonly cache = new Map<string, DetailChunk>();
  private readonly inflight = new Map<string, Promise<DetailChunk>>();

  constructor(private readonly api: Pick<ApiClient, "detail">) {}

  cached(region: string): DetailChunk | undefined {
    return this.cache.get(region);
  }

  load(region: string): Promise<DetailChunk> {
    const hit = this.cache.get(region);
    if (hit) return Promise.resolve(hit);
    const pending = this.inflight.get(region);
    if (pending) return pending;
    const request = this.api
      .detail(region)
      .then((chunk) => {
        this.cache.set(region, chunk);
        this.inflight.delete(region);
        return chunk;
      })
      .catch((error: unknown) => {
        // A failed request may be retried on the next selection.
        this.inflight.delete(region);
        throw error;
      });
    this.inflight.set(region, request);
    return request;
  }
}
