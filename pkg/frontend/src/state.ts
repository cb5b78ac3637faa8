/** Single source of truth for everything the panels render from.
 *
 * Panels never keep their own copy of the ordinal/region/track; they
 * subscribe here and re-render from the snapshot they are handed. That is
 * what keeps the three panels synchronised: there is nothing else to go
 * out of sync with.
 */

export type PlaySpeed = 1 | 2 | 4;

export type Playback =
  | { mode: "stopped" }
  | { mode: "playing"; speed: PlaySpeed };

export interface ViewState {
  ordinal: number;
  region: string | null;
  track: string;
  playback: Playback;
  showCountryList: boolean;
  showTimeline: boolean;
  showAux: boolean;
  night: boolean;
  zoom: number;
}

export type Listener = (state: ViewState) => void;

export function initialState(track: string): ViewState {
  return {
    ordinal: 0,
    region: null,
    track,
    playback: { mode: "stopped" },
    showCountryList: true,
    showTimeline: true,
    showAux: true,
    night: false,
    zoom: 1,
  };
}

export class StateStore {
  private state: ViewState;
  private listeners: Listener[] = [];

  constructor(track: string, private readonly nPeriods: number) {
    if (nPeriods < 1) throw new Error("a dashboard needs at least one period");
    this.state = initialState(track);
  }

  get(): ViewState {
    return this.state;
  }

  get periodCount(): number {
    return this.nPeriods;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  update(patch: Partial<ViewState>): void {
    const next = { ...this.state, ...patch };
    // The ordinal is always kept inside the axis; scrubbing clamps,
    // playback wraps via advance().
    next.ordinal = Math.min(Math.max(Math.trunc(next.ordinal), 0), this.nPeriods - 1);
    next.zoom = Math.min(Math.max(next.zoom, 0.5), 4);
    this.state = next;
    for (const listener of [...this.listeners]) listener(this.state);
  }

  /** Step the playback cursor forward, wrapping at the end of the axis. */
  advance(steps = 1): void {
    this.update({ ordinal: (this.state.ordinal + steps) % this.nPeriods });
  }
}
