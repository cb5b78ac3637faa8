/** Boots a real chronomap server for the test run.
 *
 * Generates the small demo fixture, ingests it into a store and serves it
 * on a free localhost port; tests receive the base URL through vitest's
 * provide/inject channel. One server instance is shared by every test
 * file, which is safe because the API is read-only.
 */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import type { TestProject } from "vitest/node";

const REPO_ROOT = fileURLToPath(new URL("../..", import.meta.url));

declare module "vitest" {
  interface ProvidedContext {
    baseUrl: string;
  }
}

function run(args: string[], cwd: string): void {
  const result = spawnSync("python3", args, { cwd, encoding: "utf-8" });
  if (result.status !== 0) {
    throw new Error(
      `python3 ${args.join(" ")} failed (${result.status}):\n${result.stdout}\n${result.stderr}`,
    );
  }
}

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.once("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address === null || typeof address === "string") {
        reject(new Error("no port assigned"));
        return;
      }
      probe.close(() => resolve(address.port));
    });
  });
}

async function waitForServer(base: string, child: ChildProcess): Promise<void> {
  const deadline = Date.now() + 30_000;
  let lastError = "";
  while (Date.now() < deadline) {
    if (child.exitCode !== null) {
      throw new Error(`server exited early with code ${child.exitCode}`);
    }
    try {
      const response = await fetch(`${base}/api/meta`);
      if (response.ok) return;
      lastError = `status ${response.status}`;
    } catch (error) {
      lastError = String(error);
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error(`server did not come up: ${lastError}`);
}

export default async function setup(project: TestProject): Promise<() => Promise<void>> {
  const workDir = mkdtempSync(join(tmpdir(), "chronomap-fe-"));
  const fixtureDir = join(workDir, "fixture");
  const storeDir = join(workDir, "store");

  run([join(REPO_ROOT, "scripts", "make_fixtures.py"),
       "--which", "demo", "--out", fixtureDir], REPO_ROOT);
  run(["-m", "chronomap.cli", "ingest",
       "--spec", join(fixtureDir, "ingest-spec.json"),
       "--in", join(fixtureDir, "data.csv"),
       "--out", storeDir], REPO_ROOT);

  const port = await freePort();
  const server = spawn(
    "python3",
    ["-m", "chronomap.cli", "serve",
     "--data", storeDir,
     "--map", join(fixtureDir, "map.svg"),
     "--host", "127.0.0.1",
     "--port", String(port)],
    { cwd: REPO_ROOT, stdio: ["ignore", "pipe", "pipe"] },
  );
  const base = `http://127.0.0.1:${port}`;

  try {
    await waitForServer(base, server);
  } catch (error) {
    server.kill("SIGKILL");
    rmSync(workDir, { recursive: true, force: true });
    throw error;
  }

  project.provide("baseUrl", base);

  return async () => {
    const gone = new Promise<void>((resolve) => server.once("exit", () => resolve()));
    server.kill("SIGTERM");
    await Promise.race([gone, new Promise((r) => setTimeout(r, 5000))]);
    if (server.exitCode === null) server.kill("SIGKILL");
    rmSync(workDir, { recursive: true, force: true });
  };
}
