/** Side panel: current period label plus per-region indicator detail.
 *
 * The detail section renders only from the loader's cache and only when
 * the cached chunk belongs to the currently selected region, so a slow
 * response for a region the user has already left can never flash in.
 */

import type { DetailChunk, Meta } from "../api.js";
import { barChartSvg, escapeXml, lineChartSvg } from "../charts.js";
import type { DetailLoader } from "../detail.js";
import type { ViewState } from "../state.js";

const SMALL_MULTIPLE = { width: 220, height: 48, padX: 4, padY: 6 };
const MAX_MULTIPLES = 8;

function pad(n: number, width: number): string {
  return String(n).padStart(width, "0");
}

/** Calendar label of a period, computed locally from the axis origin. */
export function periodLabel(meta: Meta, ordinal: number): string {
  const first = meta.periods.first;
  if (meta.granularity === "monthly") {
    const [y, m] = first.split("-").map(Number) as [number, number];
    const base = y * 12 + (m - 1) + ordinal;
    const year = Math.floor(base / 12);
    const month = base - year * 12;
    return `${pad(year, 4)}-${pad(month + 1, 2)}`;
  }
  const start = Date.parse(`${first}T00:00:00Z`);
  return new Date(start + ordinal * 86_400_000).toISOString().slice(0, 10);
}

export class AuxPanel {
  readonly root: HTMLElement;
  private readonly heading: HTMLElement;
  private readonly body: HTMLElement;
  private readonly toasts: HTMLElement;

  constructor(
    host: HTMLElement,
    private readonly meta: Meta,
    private readonly loader: DetailLoader,
    private readonly toastMillis = 4000,
  ) {
    const doc = host.ownerDocument;
    this.root = doc.createElement("aside");
    this.root.className = "panel aux-panel";
    this.heading = doc.createElement("h2");
    this.heading.className = "aux-period";
    this.body = doc.createElement("div");
    this.body.className = "aux-body";
    this.toasts = doc.createElement("div");
    this.toasts.className = "toasts";
    this.root.append(this.heading, this.body, this.toasts);
    host.appendChild(this.root);
  }

  showToast(message: string): void {
    const toast = this.root.ownerDocument.createElement("div");
    toast.className = "toast";
    toast.textContent = message;
    this.toasts.appendChild(toast);
    setTimeout(() => toast.remove(), this.toastMillis);
  }

  render(state: ViewState): void {
    this.heading.textContent = periodLabel(this.meta, state.ordinal);
    this.root.dataset["ordinal"] = String(state.ordinal);
    this.root.style.display = state.showAux ? "" : "none";

    if (state.region === null) {
      this.body.innerHTML = `<p class="hint">Select a region for indicator detail.</p>`;
      return;
    }
    const chunk = this.loader.cached(state.region);
    if (!chunk || chunk.region !== state.region) {
      this.body.innerHTML =
        `<p class="hint">Loading ${escapeXml(state.region)}…</p>`;
      return;
    }
    this.body.innerHTML = this.detailHtml(chunk, state.ordinal);
  }

  private detailHtml(chunk: DetailChunk, ordinal: number): string {
    const indicators = Object.keys(chunk.series).sort();
    const bars = indicators.map((ind) => ({
      label: ind,
      value: chunk.series[ind]?.[ordinal] ?? null,
    }));
    const parts = [
      `<h3>${escapeXml(chunk.region)}</h3>`,
      barChartSvg(bars),
    ];
    for (const ind of indicators.slice(0, MAX_MULTIPLES)) {
      const values = chunk.series[ind]!;
      parts.push(
        `<figure class="small-multiple"><figcaption>${escapeXml(ind)}</figcaption>`,
        lineChartSvg(
          [{ label: ind, color: "#2171b5", values }],
          ordinal,
          values.length,
          SMALL_MULTIPLE,
        ),
        `</figure>`,
      );
    }
    if (indicators.length > MAX_MULTIPLES) {
      parts.push(
        `<p class="hint">${indicators.length - MAX_MULTIPLES} more indicators not charted.</p>`,
      );
    }
    return parts.join("");
  }

  reportedOrdinal(): number {
    return Number(this.root.dataset["ordinal"] ?? "-1");
  }
}
