/** Dashboard assembly.
 *
 * ``bootstrap`` fetches the three eager payloads (meta, summary, base
 * map), builds the panels and renders period 0. A failure at that stage
 * produces an error card instead of a blank page. Everything after boot
 * flows through the state store: panels re-render from snapshots, and
 * only region selection may touch the network again.
 */

import { ApiClient, ApiError, type Meta, type Summary } from "./api.js";
import { escapeXml } from "./charts.js";
import { DetailLoader } from "./detail.js";
import { StateStore, type PlaySpeed, type ViewState } from "./state.js";
import { AuxPanel } from "./panels/aux.js";
import { RegionListPanel } from "./panels/list.js";
import { MapPanel } from "./panels/map.js";
import { TimelinePanel } from "./panels/timeline.js";

export interface BootOptions {
  baseUrl: string;
  fetchFn?: typeof fetch;
  /** Screen capture button; off by default and never exercised in tests. */
  enableRecording?: boolean;
}

export type BootResult =
  | { ok: true; dashboard: Dashboard }
  | { ok: false; error: Error };

export async function bootstrap(root: HTMLElement, options: BootOptions): Promise<BootResult> {
  const api = new ApiClient(options.baseUrl, options.fetchFn);
  let meta: Meta;
  let summary: Summary;
  let svgText: string;
  try {
    [meta, summary, svgText] = await Promise.all([api.meta(), api.summary(), api.mapSvg()]);
    if (meta.tracks.length === 0) throw new Error("store declares no tracks");
  } catch (raw) {
    const error = raw instanceof Error ? raw : new Error(String(raw));
    root.innerHTML =
      `<div class="error-card"><h2>Dashboard unavailable</h2>` +
      `<p>${escapeXml(error.message)}</p></div>`;
    return { ok: false, error };
  }
  return { ok: true, dashboard: new Dashboard(root, api, meta, summary, svgText, options) };
}

export class Dashboard {
  readonly store: StateStore;
  readonly loader: DetailLoader;
  readonly map: MapPanel;
  readonly timeline: TimelinePanel;
  readonly aux: AuxPanel;
  readonly list: RegionListPanel;

  private readonly container: HTMLElement;
  private readonly unsubscribe: () => void;
  private timer: ReturnType<typeof setInterval> | null = null;
  private readonly pending = new Set<Promise<unknown>>();

  constructor(
    private readonly root: HTMLElement,
    readonly api: ApiClient,
    readonly meta: Meta,
    readonly summary: Summary,
    svgText: string,
    options: BootOptions,
  ) {
    this.store = new StateStore(meta.tracks[0]!.name, meta.periods.count);
    this.loader = new DetailLoader(api);

    const doc = root.ownerDocument;
    this.container = doc.createElement("div");
    this.container.className = "dashboard";
    const menu = this.buildMenu(doc, options.enableRecording === true);
    const columns = doc.createElement("div");
    columns.className = "columns";
    const timelineHost = doc.createElement("div");
    this.container.append(menu, columns, timelineHost);
    root.replaceChildren(this.container);

    const select = (region: string) => this.selectRegion(region);
    this.list = new RegionListPanel(columns, summary, select);
    this.map = new MapPanel(columns, svgText, summary, this.store, select);
    this.aux = new AuxPanel(columns, meta, this.loader);
    this.timeline = new TimelinePanel(timelineHost, summary, this.store, this);

    this.unsubscribe = this.store.subscribe((state) => this.render(state));
    this.render(this.store.get());
  }

  private buildMenu(doc: Document, recording: boolean): HTMLElement {
    const menu = doc.createElement("header");
    menu.className = "menu";
    const add = (label: string, action: () => void) => {
      const button = doc.createElement("button");
      button.type = "button";
      button.textContent = label;
      button.addEventListener("click", action);
      menu.appendChild(button);
      return button;
    };
    add("Regions", () => this.store.update({ showCountryList: !this.store.get().showCountryList }));
    add("Timeline", () => this.store.update({ showTimeline: !this.store.get().showTimeline }));
    add("Detail", () => this.store.update({ showAux: !this.store.get().showAux }));
    add("Night", () => this.store.update({ night: !this.store.get().night }));
    add("Zoom +", () => this.store.update({ zoom: this.store.get().zoom * 1.25 }));
    add("Zoom −", () => this.store.update({ zoom: this.store.get().zoom / 1.25 }));

    const help = doc.createElement("div");
    help.className = "help";
    help.hidden = true;
    help.innerHTML =
      "<h3>Help</h3><p>Click a region on the map or in the list for detail. " +
      "Drag the slider to scrub through time; Play animates the map.</p>";
    this.container.appendChild(help);
    add("Help", () => {
      help.hidden = !help.hidden;
    });

    if (recording) add("Record", () => void this.startRecording());
    return menu;
  }

  private render(state: ViewState): void {
    this.map.render(state);
    this.timeline.render(state);
    this.aux.render(state);
    this.list.render(state);
    this.container.classList.toggle("night", state.night);
  }

  /** Select a region and fetch its detail chunk (cached after the first time). */
  selectRegion(region: string): void {
    this.store.update({ region });
    const request = this.loader
      .load(region)
      .then(() => {
        // Re-render only if the user is still looking at this region.
        if (this.store.get().region === region) this.store.update({});
      })
      .catch((error: unknown) => {
        if (error instanceof ApiError && error.status === 404) {
          this.aux.showToast(`No detail available for ${region}.`);
          if (this.store.get().region === region) this.store.update({ region: null });
        } else {
          const message = error instanceof Error ? error.message : String(error);
          this.aux.showToast(`Detail request failed: ${message}`);
        }
      });
    this.pending.add(request);
    void request.finally(() => this.pending.delete(request));
  }

  /** Resolves once in-flight detail requests have settled. Test hook. */
  async whenIdle(): Promise<void> {
    while (this.pending.size > 0) {
      await Promise.allSettled([...this.pending]);
    }
  }

  scrub(ordinal: number): void {
    this.store.update({ ordinal });
  }

  play(speed: PlaySpeed): void {
    this.stopTimer();
    this.store.update({ playback: { mode: "playing", speed } });
    this.timer = setInterval(() => this.store.advance(1), 1000 / speed);
  }

  stop(): void {
    this.stopTimer();
    this.store.update({ playback: { mode: "stopped" } });
  }

  private stopTimer(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  private async startRecording(): Promise<void> {
    const view = this.root.ownerDocument.defaultView;
    const devices = view?.navigator.mediaDevices;
    if (!devices?.getDisplayMedia) {
      this.aux.showToast("Screen capture is not available in this browser.");
      return;
    }
    try {
      const stream = await devices.getDisplayMedia({ video: true });
      const recorder = new view!.MediaRecorder(stream);
      const blobs: Blob[] = [];
      recorder.addEventListener("dataavailable", (event) => blobs.push(event.data));
      recorder.addEventListener("stop", () => {
        for (const track of stream.getTracks()) track.stop();
        const url = URL.createObjectURL(new Blob(blobs, { type: "video/webm" }));
        const anchor = this.root.ownerDocument.createElement("a");
        anchor.href = url;
        anchor.download = "dashboard.webm";
        anchor.click();
        URL.revokeObjectURL(url);
      });
      recorder.start();
      this.aux.showToast("Recording; stop sharing to save the capture.");
      stream.getVideoTracks()[0]?.addEventListener("ended", () => recorder.stop());
    } catch {
      this.aux.showToast("Screen capture was cancelled.");
    }
  }

  dispose(): void {
    this.stop();
    this.unsubscribe();
    this.root.replaceChildren();
  }
}
