import { inject } from "vitest";
import { bootstrap, type BootOptions, type Dashboard } from "../src/main.js";

/** The environment's fetch, wrapped so it is never called unbound. */
export const netFetch: typeof fetch = (input, init) => fetch(input, init);

export interface Booted {
  dashboard: Dashboard;
  root: HTMLElement;
}

export async function bootDashboard(options: Partial<BootOptions> = {}): Promise<Booted> {
  const root = document.createElement("div");
  document.body.appendChild(root);
  const result = await bootstrap(root, {
    baseUrl: inject("baseUrl"),
    fetchFn: netFetch,
    ...options,
  });
  if (!result.ok) {
    root.remove();
    throw new Error(`bootstrap failed: ${result.error.message}`);
  }
  return { dashboard: result.dashboard, root };
}

export function tearDown(booted: Booted): void {
  booted.dashboard.dispose();
  booted.root.remove();
}
