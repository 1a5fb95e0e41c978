import { spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";

import type { App } from "../src/app.js";
import type { FetchLike, FloodBody, LonLat, RouteBody } from "../src/api.js";

/** Road junction west of the river in the bundled valley scenario. */
export const WEST: LonLat = { lon: -79.195, lat: 34.625 };
/** Road junction east of the river. */
export const EAST: LonLat = { lon: -78.805, lat: 34.625 };

/** jsdom computes no layout, so Leaflet sees a zero-size map container
 * unless the dimensions are pinned explicitly. */
export function sizeMapContainer(el: HTMLElement, width = 800, height = 600): void {
  Object.defineProperty(el, "clientWidth", { value: width, configurable: true });
  Object.defineProperty(el, "clientHeight", { value: height, configurable: true });
  Object.defineProperty(el, "offsetWidth", { value: width, configurable: true });
  Object.defineProperty(el, "offsetHeight", { value: height, configurable: true });
  el.getBoundingClientRect = () =>
    ({
      x: 0,
      y: 0,
      top: 0,
      left: 0,
      right: width,
      bottom: height,
      width,
      height,
      toJSON: () => ({}),
    }) as DOMRect;
}

/** Poll until the probe returns something truthy. */
export async function until<T>(
  probe: () => T | null | undefined | false,
  what: string,
  timeoutMs = 15_000,
): Promise<T> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    const value = probe();
    if (value) {
      return value;
    }
    if (Date.now() > deadline) {
      throw new Error(`timed out waiting for ${what}`);
    }
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
}

/** Click the map at a geographic position by dispatching a mouse event
 * at the matching container pixel. */
export function clickMapAt(app: App, point: LonLat): void {
  const mapEl = app.root.querySelector<HTMLElement>("#map");
  if (mapEl === null) {
    throw new Error("missing #map");
  }
  const pixel = app.mapView.map.latLngToContainerPoint([point.lat, point.lon]);
  mapEl.dispatchEvent(
    new MouseEvent("click", {
      clientX: pixel.x,
      clientY: pixel.y,
      bubbles: true,
      cancelable: true,
    }),
  );
}

// --- mock service plumbing for unit tests -----------------------------------

export function floodBody(cellCount: number, version = 1): FloodBody {
  const features = Array.from({ length: cellCount }, (_, i) => ({
    type: "Feature" as const,
    geometry: {
      type: "Polygon" as const,
      coordinates: [
        [
          [i, 0],
          [i + 1, 0],
          [i + 1, 1],
          [i, 1],
          [i, 0],
        ],
      ],
    },
    properties: { source: "fused" },
  }));
  return { type: "FeatureCollection", features, version };
}

export interface Leg {
  id: string;
  coords: number[][];
  length: number;
}

export function routeBody(legs: Leg[], version = 1): RouteBody {
  const total = legs.reduce((sum, leg) => sum + leg.length, 0);
  return {
    route: {
      type: "FeatureCollection",
      features: [
        ...legs.map((leg) => ({
          type: "Feature" as const,
          geometry: { type: "LineString" as const, coordinates: leg.coords },
          properties: { edge_id: leg.id, length_m: leg.length },
        })),
        {
          type: "Feature" as const,
          geometry: null,
          properties: {
            summary: true,
            origin: "a",
            destination: "b",
            total_cost: total,
            total_length_m: total,
          },
        },
      ],
    },
    origin_node: "a",
    destination_node: "b",
    version,
  };
}

/** Two-leg primary route used across the mock-service tests. */
export const LEGS: Leg[] = [
  { id: "ab", coords: [[0, 0], [1, 0]], length: 1000 },
  { id: "bc", coords: [[1, 0], [2, 0]], length: 500 },
];

export interface RecordedRequest {
  url: URL;
  method: string;
  body: string | undefined;
  signal: AbortSignal | undefined;
}

export type MockHandler = (
  url: URL,
  signal: AbortSignal | undefined,
) => Promise<{ status: number; body: unknown }> | { status: number; body: unknown };

/** FetchLike backed by a handler; records every request it serves. */
export function mockFetch(handler: MockHandler): { fetchFn: FetchLike; requests: RecordedRequest[] } {
  const requests: RecordedRequest[] = [];
  const fetchFn: FetchLike = async (rawUrl, init) => {
    const url = new URL(rawUrl);
    requests.push({ url, method: init?.method ?? "GET", body: init?.body, signal: init?.signal });
    const { status, body } = await handler(url, init?.signal);
    return {
      ok: status >= 200 && status < 300,
      status,
      json: async () => body,
    };
  };
  return { fetchFn, requests };
}

/** Promise that rejects with an AbortError when the signal fires,
 * mimicking an in-flight request that never completes. */
export function hangUntilAborted(signal: AbortSignal | undefined): Promise<never> {
  return new Promise((_resolve, reject) => {
    if (signal === undefined) {
      return;
    }
    const abort = () => reject(new DOMException("The operation was aborted.", "AbortError"));
    if (signal.aborted) {
      abort();
    } else {
      signal.addEventListener("abort", abort, { once: true });
    }
  });
}

// --- live service plumbing for acceptance tests ------------------------------

export interface ServiceHandle {
  url: string;
  /** Manifest path on disk, as the service host sees it. */
  manifestPath: string;
  stop(): Promise<void>;
}

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.once("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address === null || typeof address === "string") {
        probe.close(() => reject(new Error("no port assigned")));
        return;
      }
      probe.close(() => resolve(address.port));
    });
  });
}

function waitForExit(proc: ChildProcess, timeoutMs: number): Promise<void> {
  return new Promise((resolve) => {
    if (proc.exitCode !== null || proc.signalCode !== null) {
      resolve();
      return;
    }
    const killTimer = setTimeout(() => proc.kill("SIGKILL"), timeoutMs);
    proc.once("exit", () => {
      clearTimeout(killTimer);
      resolve();
    });
  });
}

function runPython(args: string[]): Promise<void> {
  return new Promise((resolve, reject) => {
    const proc = spawn("python3", args, { stdio: ["ignore", "ignore", "pipe"] });
    let stderr = "";
    proc.stderr?.on("data", (chunk: Buffer) => {
      stderr += chunk.toString();
    });
    proc.once("exit", (code) => {
      if (code === 0) {
        resolve();
      } else {
        reject(new Error(`python3 ${args[0] ?? ""} exited ${code}: ${stderr}`));
      }
    });
    proc.once("error", reject);
  });
}

/** Generate the bundled valley scenario in a temp dir and serve it with
 * the real routing service. */
export async function startValleyService(): Promise<ServiceHandle> {
  const dir = mkdtempSync(join(tmpdir(), "valley-ui-"));
  await runPython([
    "-c",
    "import sys; from floodroute.valley import write_valley_scenario; write_valley_scenario(sys.argv[1])",
    dir,
  ]);
  const port = await freePort();
  const proc = spawn(
    "python3",
    [
      "-m",
      "floodroute.cli",
      "serve",
      "--scenario",
      join(dir, "manifest.json"),
      "--listen",
      `127.0.0.1:${port}`,
    ],
    { stdio: ["ignore", "ignore", "pipe"] },
  );
  let stderr = "";
  proc.stderr?.on("data", (chunk: Buffer) => {
    stderr += chunk.toString();
  });

  const url = `http://127.0.0.1:${port}`;
  const deadline = Date.now() + 60_000;
  for (;;) {
    if (proc.exitCode !== null) {
      throw new Error(`service exited early (${proc.exitCode}): ${stderr}`);
    }
    try {
      const response = await fetch(`${url}/health`);
      if (response.ok) {
        break;
      }
    } catch {
      // not listening yet
    }
    if (Date.now() > deadline) {
      proc.kill("SIGKILL");
      throw new Error(`service never became healthy: ${stderr}`);
    }
    await new Promise((resolve) => setTimeout(resolve, 100));
  }

  return {
    url,
    manifestPath: join(dir, "manifest.json"),
    stop: async () => {
      proc.kill("SIGINT");
      await waitForExit(proc, 5_000);
      rmSync(dir, { recursive: true, force: true });
    },
  };
}
