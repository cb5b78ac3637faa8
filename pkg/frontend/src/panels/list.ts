/** Hideable region list; clicking an entry selects that region. */

import type { Summary } from "../api.js";
import type { ViewState } from "../state.js";

export class RegionListPanel {
  readonly root: HTMLElement;

  constructor(
    host: HTMLElement,
    summary: Summary,
    onSelect: (region: string) => void,
  ) {
    const doc = host.ownerDocument;
    this.root = doc.createElement("nav");
    this.root.className = "panel list-panel";
    const ul = doc.createElement("ul");
    for (const region of [...summary.regions].sort()) {
      const li = doc.createElement("li");
      const button = doc.createElement("button");
      button.type = "button";
      button.textContent = region;
      button.dataset["region"] = region;
      button.addEventListener("click", () => onSelect(region));
      li.appendChild(button);
      ul.appendChild(li);
    }
    this.root.appendChild(ul);
    host.appendChild(this.root);
  }

  render(state: ViewState): void {
    this.root.style.display = state.showCountryList ? "" : "none";
    for (const button of this.root.querySelectorAll("button")) {
      button.classList.toggle("selected", button.dataset["region"] === state.region);
    }
  }
}
