import { describe, expect, it } from "vitest";
import type { Summary } from "../src/api.js";
import {
  DEFAULT_RAMP,
  MISSING_COLOR,
  binIndex,
  colorFor,
  computeFrame,
  makeRamp,
  scaleForTrack,
  type ColorScale,
} from "../src/color.js";

function linearScale(vmin: number, vmax: number, bins = 7): ColorScale {
  return { kind: "linear", bins, ramp: makeRamp(bins), domain: [vmin, vmax], missingColor: MISSING_COLOR };
}

describe("makeRamp", () => {
  it("returns the anchors untouched when sizes match", () => {
    expect(makeRamp(7)).toEqual([...DEFAULT_RAMP]);
  });

  it("keeps the endpoints when resampling", () => {
    for (const bins of [2, 3, 5, 9, 12]) {
      const ramp = makeRamp(bins);
      expect(ramp).toHaveLength(bins);
      expect(ramp[0]).toBe(DEFAULT_RAMP[0]);
      expect(ramp[bins - 1]).toBe(DEFAULT_RAMP[DEFAULT_RAMP.length - 1]);
    }
  });

  it("rejects degenerate sizes", () => {
    expect(() => makeRamp(1)).toThrow();
  });
});

describe("binIndex", () => {
  it("clamps out-of-domain values into the edge bins", () => {
    const scale = linearScale(0, 7);
    expect(binIndex(-100, scale)).toBe(0);
    expect(binIndex(0, scale)).toBe(0);
    expect(binIndex(3.5, scale)).toBe(3);
    expect(binIndex(6.999, scale)).toBe(6);
    expect(binIndex(7, scale)).toBe(6);
    expect(binIndex(1e12, scale)).toBe(6);
  });

  it("survives a nearly degenerate domain", () => {
    const scale = linearScale(-1e-303, 0);
    expect(binIndex(16126.0, scale)).toBe(6);
    expect(binIndex(-1e300, scale)).toBe(0);
  });

  it("uses left-closed quantile intervals", () => {
    const scale: ColorScale = {
      kind: "quantile",
      bins: 2,
      ramp: makeRamp(2),
      domain: [1, 2, 3, 4],
      missingColor: MISSING_COLOR,
    };
    expect(binIndex(0, scale)).toBe(0);
    expect(binIndex(1, scale)).toBe(0);
    expect(binIndex(2, scale)).toBe(0);
    expect(binIndex(3, scale)).toBe(1);
    expect(binIndex(4, scale)).toBe(1);
    expect(binIndex(99, scale)).toBe(1);
  });
});

const SUMMARY: Summary = {
  kind: "summary",
  n_periods: 3,
  regions: ["AA", "BB"],
  tracks: [
    { name: "obs", values: [[0, 5, null], [10, null, 2]] },
    { name: "flat", values: [[4, 4, 4], [4, 4, 4]] },
    { name: "void", values: [[null, null, null], [null, null, null]] },
  ],
};

describe("scaleForTrack", () => {
  it("spans the whole region x period range", () => {
    const scale = scaleForTrack(SUMMARY, "obs");
    expect(scale.domain).toEqual([0, 10]);
  });

  it("widens a single-valued track and defaults an empty one", () => {
    expect(scaleForTrack(SUMMARY, "flat").domain).toEqual([4, 5]);
    expect(scaleForTrack(SUMMARY, "void").domain).toEqual([0, 1]);
    expect(scaleForTrack(SUMMARY, "void", "quantile").kind).toBe("linear");
  });

  it("rejects unknown tracks", () => {
    expect(() => scaleForTrack(SUMMARY, "nope")).toThrow(/not in the summary/);
  });
});

describe("computeFrame", () => {
  it("assigns every region and paints gaps with the missing color", () => {
    const scale = scaleForTrack(SUMMARY, "obs");
    const frame = computeFrame(SUMMARY, 2, "obs", scale);
    expect(Object.keys(frame).sort()).toEqual(["AA", "BB"]);
    expect(frame["AA"]).toBe(MISSING_COLOR);
    expect(frame["BB"]).toBe(scale.ramp[binIndex(2, scale)]);
  });

  it("rejects an out-of-range ordinal", () => {
    const scale = scaleForTrack(SUMMARY, "obs");
    expect(() => computeFrame(SUMMARY, 3, "obs", scale)).toThrow(/outside/);
  });
});

describe("colorFor", () => {
  it("maps null and non-finite cells to the missing color", () => {
    const scale = linearScale(0, 1);
    expect(colorFor(null, scale)).toBe(MISSING_COLOR);
    expect(colorFor(Number.NaN, scale)).toBe(MISSING_COLOR);
    expect(colorFor(0.5, scale)).toBe(scale.ramp[3]);
  });
});
