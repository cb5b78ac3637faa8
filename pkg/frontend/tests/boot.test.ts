import { afterEach, describe, expect, it } from "vitest";
import { bootstrap } from "../src/main.js";
import { bootDashboard, tearDown, type Booted } from "./helpers.js";

let booted: Booted | null = null;

afterEach(() => {
  if (booted) tearDown(booted);
  booted = null;
});

describe("bootstrap", () => {
  it("renders an error card instead of a blank page when the server is down", async () => {
    const failing: typeof fetch = () => Promise.reject(new TypeError("fetch failed"));
    const root = document.createElement("div");
    document.body.appendChild(root);
    const result = await bootstrap(root, { baseUrl: "http://127.0.0.1:9", fetchFn: failing });
    expect(result.ok).toBe(false);
    expect(root.querySelector(".error-card")).not.toBeNull();
    expect(root.textContent).toContain("Dashboard unavailable");
    expect(root.textContent).toContain("fetch failed");
    root.remove();
  });

  it("renders period 0 of the first track everywhere right after boot", async () => {
    booted = await bootDashboard();
    const dash = booted.dashboard;
    expect(dash.store.get().ordinal).toBe(0);
    expect(dash.store.get().track).toBe(dash.meta.tracks[0]!.name);
    expect(dash.map.reportedOrdinal()).toBe(0);
    expect(dash.timeline.reportedOrdinal()).toBe(0);
    expect(dash.aux.reportedOrdinal()).toBe(0);
    expect(booted.root.querySelector(".map-viewport svg")).not.toBeNull();
    expect(booted.root.querySelector(".aux-period")?.textContent).toBe(
      dash.meta.periods.first,
    );
  });

  it("toasts and clears the selection when detail for a region 404s", async () => {
    booted = await bootDashboard();
    const dash = booted.dashboard;
    // Well-formed code with no data in the demo store.
    dash.selectRegion("ZZ");
    await dash.whenIdle();
    expect(dash.store.get().region).toBeNull();
    const toast = booted.root.querySelector(".toast");
    expect(toast).not.toBeNull();
    expect(toast!.textContent).toContain("ZZ");
  });
});
