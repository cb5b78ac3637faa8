import { describe, expect, it } from "vitest";
import { StateStore, initialState } from "../src/state.js";

describe("StateStore", () => {
  it("starts at period 0 with nothing selected and playback stopped", () => {
    const state = initialState("cases");
    expect(state.ordinal).toBe(0);
    expect(state.region).toBeNull();
    expect(state.playback).toEqual({ mode: "stopped" });
    expect(state.track).toBe("cases");
  });

  it("clamps the ordinal and the zoom", () => {
    const store = new StateStore("cases", 12);
    store.update({ ordinal: 99 });
    expect(store.get().ordinal).toBe(11);
    store.update({ ordinal: -5 });
    expect(store.get().ordinal).toBe(0);
    store.update({ ordinal: 3.9 });
    expect(store.get().ordinal).toBe(3);
    store.update({ zoom: 100 });
    expect(store.get().zoom).toBe(4);
    store.update({ zoom: 0.01 });
    expect(store.get().zoom).toBe(0.5);
  });

  it("wraps playback advances at the end of the axis", () => {
    const store = new StateStore("cases", 4);
    store.update({ ordinal: 3 });
    store.advance(1);
    expect(store.get().ordinal).toBe(0);
    store.advance(7);
    expect(store.get().ordinal).toBe(3);
  });

  it("notifies subscribers until they unsubscribe", () => {
    const store = new StateStore("cases", 4);
    const seen: number[] = [];
    const unsubscribe = store.subscribe((s) => seen.push(s.ordinal));
    store.update({ ordinal: 1 });
    store.update({ ordinal: 2 });
    unsubscribe();
    store.update({ ordinal: 3 });
    expect(seen).toEqual([1, 2]);
  });

  it("rejects an empty axis", () => {
    expect(() => new StateStore("cases", 0)).toThrow();
  });
});
