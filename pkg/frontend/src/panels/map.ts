/** Center panel: the choropleth map.
 *
 * Recoloring mirrors the server's SVG patch rule: an element is keyed by
 * its id attribute, falling back to data-id only when id is absent, and
 * the fill is set both as an attribute and inside any existing inline
 * style so author styles cannot mask it.
 */

import type { Summary } from "../api.js";
import { computeFrame, scaleForTrack, type ColorScale, type ScaleKind } from "../color.js";
import { formatValue } from "../charts.js";
import type { StateStore, ViewState } from "../state.js";

function patchStyle(style: string, color: string): string {
  const parts: string[] = [];
  let patched = false;
  for (const chunk of style.split(";")) {
    if (!chunk.trim()) continue;
    const prop = chunk.split(":", 1)[0]!;
    if (prop.trim().toLowerCase() === "fill") {
      parts.push(`fill:${color}`);
      patched = true;
    } else {
      parts.push(chunk.trim());
    }
  }
  if (!patched) parts.push(`fill:${color}`);
  return parts.join(";");
}

export class MapPanel {
  readonly root: HTMLElement;
  private readonly viewport: HTMLElement;
  private readonly tooltip: HTMLElement;
  private readonly scales = new Map<string, ColorScale>();
  private readonly regionSet: Set<string>;

  constructor(
    host: HTMLElement,
    svgText: string,
    private readonly summary: Summary,
    private readonly store: StateStore,
    private readonly onSelect: (region: string) => void,
    private readonly scaleKind: ScaleKind = "linear",
  ) {
    this.regionSet = new Set(summary.regions);
    this.root = host.ownerDocument.createElement("section");
    this.root.className = "panel map-panel";
    this.viewport = host.ownerDocument.createElement("div");
    this.viewport.className = "map-viewport";
    // innerHTML chokes on the XML declaration; the markup after it is fine.
    this.viewport.innerHTML = svgText.replace(/^\s*<\?xml[^>]*\?>\s*/, "");
    this.tooltip = host.ownerDocument.createElement("div");
    this.tooltip.className = "map-tooltip";
    this.tooltip.style.display = "none";
    this.root.append(this.viewport, this.tooltip);
    host.appendChild(this.root);

    this.viewport.addEventListener("click", (event) => {
      const region = this.regionAt(event.target);
      if (region) this.onSelect(region);
    });
    // Hover shows the eager summary value only; it never fetches detail.
    this.viewport.addEventListener("mouseover", (event) => {
      const region = this.regionAt(event.target);
      if (region) this.showTooltip(region);
      else this.tooltip.style.display = "none";
    });
  }

  private regionAt(target: EventTarget | null): string | null {
    if (!(target instanceof Element)) return null;
    const hit = target.closest("[id], [data-id]");
    if (!hit) return null;
    const key = hit.getAttribute("id") ?? hit.getAttribute("data-id");
    return key !== null && this.regionSet.has(key) ? key : null;
  }

  private scaleFor(track: string): ColorScale {
    const key = `${this.scaleKind}:${track}`;
    let scale = this.scales.get(key);
    if (!scale) {
      scale = scaleForTrack(this.summary, track, this.scaleKind);
      this.scales.set(key, scale);
    }
    return scale;
  }

  /** The current frame, identical to the server's /api/frame JSON. */
  frame(state: ViewState): Record<string, string> {
    return computeFrame(this.summary, state.ordinal, state.track, this.scaleFor(state.track));
  }

  render(state: ViewState): void {
    const assignment = this.frame(state);
    for (const el of Array.from(this.viewport.querySelectorAll("[id], [data-id]"))) {
      const key = el.getAttribute("id") ?? el.getAttribute("data-id");
      if (key === null) continue;
      const color = assignment[key];
      if (color === undefined) continue;
      el.setAttribute("fill", color);
      const style = el.getAttribute("style");
      if (style !== null) el.setAttribute("style", patchStyle(style, color));
      el.classList.toggle("selected", key === state.region);
    }
    this.viewport.style.transform = state.zoom === 1 ? "" : `scale(${state.zoom})`;
    this.root.dataset["ordinal"] = String(state.ordinal);
  }

  private showTooltip(region: string): void {
    const state = this.store.get();
    const index = this.summary.regions.indexOf(region);
    const track = this.summary.tracks.find((t) => t.name === state.track);
    const value = index >= 0 ? track?.values[index]?.[state.ordinal] ?? null : null;
    this.tooltip.textContent =
      value === null || value === undefined
        ? `${region}: no data`
        : `${region}: ${formatValue(value)}`;
    this.tooltip.style.display = "block";
  }

  /** Ordinal this panel last rendered, read back from the DOM. */
  reportedOrdinal(): number {
    return Number(this.root.dataset["ordinal"] ?? -1);
  }
}
