/** Bottom panel: time-series chart with scrubber and play controls.
 *
 * All declared tracks are drawn together (prediction next to ground
 * truth). With a region selected the lines show that region's series;
 * otherwise the per-period mean over regions with data.
 */

import type { Cell, Summary } from "../api.js";
import { TIMELINE_BOX, lineChartSvg, xFor } from "../charts.js";
import type { PlaySpeed, StateStore, ViewState } from "../state.js";

const TRACK_COLORS = ["#2171b5", "#e4572e", "#3a7d44", "#7b5ea7"];

export interface PlaybackControl {
  play(speed: PlaySpeed): void;
  stop(): void;
}

function seriesFor(summary: Summary, track: string, region: string | null): Cell[] {
  const entry = summary.tracks.find((t) => t.name === track);
  if (!entry) return [];
  if (region !== null) {
    const index = summary.regions.indexOf(region);
    if (index >= 0) return [...entry.values[index]!];
  }
  const out: Cell[] = [];
  for (let p = 0; p < summary.n_periods; p++) {
    let sum = 0;
    let n = 0;
    for (const row of entry.values) {
      const v = row[p];
      if (typeof v === "number" && Number.isFinite(v)) {
        sum += v;
        n += 1;
      }
    }
    out.push(n > 0 ? sum / n : null);
  }
  return out;
}

export class TimelinePanel {
  readonly root: HTMLElement;
  private readonly chart: HTMLElement;
  private readonly scrubber: HTMLInputElement;
  private readonly playButton: HTMLButtonElement;
  private readonly speedSelect: HTMLSelectElement;

  constructor(
    host: HTMLElement,
    private readonly summary: Summary,
    private readonly store: StateStore,
    private readonly playback: PlaybackControl,
  ) {
    const doc = host.ownerDocument;
    this.root = doc.createElement("section");
    this.root.className = "panel timeline-panel";

    this.chart = doc.createElement("div");
    this.chart.className = "timeline-chart";

    const controls = doc.createElement("div");
    controls.className = "timeline-controls";

    this.scrubber = doc.createElement("input");
    this.scrubber.type = "range";
    this.scrubber.min = "0";
    this.scrubber.max = String(store.periodCount - 1);
    this.scrubber.step = "1";
    this.scrubber.addEventListener("input", () => {
      this.store.update({ ordinal: Number(this.scrubber.value) });
    });

    this.playButton = doc.createElement("button");
    this.playButton.type = "button";
    this.playButton.addEventListener("click", () => {
      const state = this.store.get();
      if (state.playback.mode === "playing") this.playback.stop();
      else this.playback.play(this.currentSpeed());
    });

    this.speedSelect = doc.createElement("select");
    for (const speed of [1, 2, 4]) {
      const option = doc.createElement("option");
      option.value = String(speed);
      option.textContent = `${speed}x`;
      this.speedSelect.appendChild(option);
    }
    this.speedSelect.addEventListener("change", () => {
      if (this.store.get().playback.mode === "playing") {
        this.playback.play(this.currentSpeed());
      }
    });

    controls.append(this.playButton, this.speedSelect, this.scrubber);
    this.root.append(this.chart, controls);
    host.appendChild(this.root);
  }

  private currentSpeed(): PlaySpeed {
    const raw = Number(this.speedSelect.value);
    return raw === 2 || raw === 4 ? raw : 1;
  }

  render(state: ViewState): void {
    const lines = this.summary.tracks.map((track, i) => ({
      label: track.name,
      color: TRACK_COLORS[i % TRACK_COLORS.length]!,
      values: seriesFor(this.summary, track.name, state.region),
    }));
    this.chart.innerHTML = lineChartSvg(lines, state.ordinal, this.store.periodCount);
    this.scrubber.value = String(state.ordinal);
    this.playButton.textContent = state.playback.mode === "playing" ? "Stop" : "Play";
    this.root.style.display = state.showTimeline ? "" : "none";
    this.root.dataset["ordinal"] = String(state.ordinal);
  }

  /** Ordinal of the rendered cursor, recovered from its x position. */
  cursorOrdinal(): number {
    const cursor = this.chart.querySelector("line.cursor");
    if (!cursor) return -1;
    const x = Number(cursor.getAttribute("x1"));
    const count = this.store.periodCount;
    for (let ordinal = 0; ordinal < count; ordinal++) {
      if (Math.abs(xFor(ordinal, count, TIMELINE_BOX) - x) < 0.51) return ordinal;
    }
    return -1;
  }

  reportedOrdinal(): number {
    return this.cursorOrdinal();
  }
}
