/** The client recolors the map locally during scrubbing and playback, so
 * its frame computation must agree with the server's /api/frame for every
 * period, not just look similar. Compared as JSON for every ordinal and
 * for both configured scale kinds.
 */

import { describe, expect, inject, it } from "vitest";
import { ApiClient, type Meta, type Summary } from "../src/api.js";
import { computeFrame, scaleForTrack, type ScaleKind } from "../src/color.js";
import { netFetch } from "./helpers.js";

function canonical(doc: Record<string, string>): string {
  return JSON.stringify(doc, Object.keys(doc).sort());
}

async function load(): Promise<{ api: ApiClient; meta: Meta; summary: Summary }> {
  const api = new ApiClient(inject("baseUrl"), netFetch);
  const [meta, summary] = await Promise.all([api.meta(), api.summary()]);
  return { api, meta, summary };
}

describe("client/server frame parity", () => {
  it("matches the default scale for every ordinal and track", async () => {
    const { api, meta, summary } = await load();
    expect(meta.periods.count).toBeGreaterThan(1);
    for (const track of meta.tracks.map((t) => t.name)) {
      const scale = scaleForTrack(summary, track, "linear");
      for (let ordinal = 0; ordinal < meta.periods.count; ordinal++) {
        const served = await api.frame(ordinal, track);
        const local = computeFrame(summary, ordinal, track, scale);
        expect(canonical(local), `track ${track} ordinal ${ordinal}`).toBe(canonical(served));
      }
    }
  });

  it("matches the quantile scale for every ordinal and track", async () => {
    const { api, meta, summary } = await load();
    for (const track of meta.tracks.map((t) => t.name)) {
      const scale = scaleForTrack(summary, track, "quantile");
      for (let ordinal = 0; ordinal < meta.periods.count; ordinal++) {
        const served = await api.frame(ordinal, track, "quantile");
        const local = computeFrame(summary, ordinal, track, scale);
        expect(canonical(local), `track ${track} ordinal ${ordinal}`).toBe(canonical(served));
      }
    }
  });

  it("uses the same default track as the server", async () => {
    const { api, meta, summary } = await load();
    const track = meta.tracks[0]!.name;
    const kinds: ScaleKind[] = ["linear"];
    for (const kind of kinds) {
      const scale = scaleForTrack(summary, track, kind);
      const served = await api.frame(0);
      expect(canonical(computeFrame(summary, 0, track, scale))).toBe(canonical(served));
    }
  });
});
