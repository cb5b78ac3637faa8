import { describe, expect, it } from "vitest";
import {
  TIMELINE_BOX,
  escapeXml,
  finiteRange,
  lineChartSvg,
  polylineSegments,
  xFor,
} from "../src/charts.js";

describe("polylineSegments", () => {
  it("splits the line at data gaps", () => {
    const segments = polylineSegments([1, null, 2, 3], 0, 3, TIMELINE_BOX);
    expect(segments).toHaveLength(2);
    expect(segments[0]!.split(" ")).toHaveLength(1);
    expect(segments[1]!.split(" ")).toHaveLength(2);
  });

  it("is empty for an all-gap series", () => {
    expect(polylineSegments([null, null], 0, 1, TIMELINE_BOX)).toEqual([]);
  });
});

describe("finiteRange", () => {
  it("pads degenerate ranges so drawing never divides by zero", () => {
    expect(finiteRange([])).toEqual([0, 1]);
    expect(finiteRange([[null, null]])).toEqual([0, 1]);
    expect(finiteRange([[7, 7]])).toEqual([6.5, 7.5]);
    expect(finiteRange([[1, 9], [null, 4]])).toEqual([1, 9]);
  });
});

describe("lineChartSvg", () => {
  it("places the cursor at the ordinal's x position", () => {
    const svg = lineChartSvg(
      [{ label: "a", color: "#123456", values: [0, 1, 2, 3] }],
      2,
      4,
    );
    const expected = xFor(2, 4, TIMELINE_BOX).toFixed(1);
    expect(svg).toContain(`class="cursor" x1="${expected}"`);
    expect(svg).toContain("polyline");
  });
});

describe("escapeXml", () => {
  it("escapes markup metacharacters", () => {
    expect(escapeXml(`<a & "b">`)).toBe("&lt;a &amp; &quot;b&quot;&gt;");
  });
});
