/** Typed client for the routing service's JSON endpoints.
 *
 * The client never interprets geometry: bodies are passed through to the
 * caller exactly as the service returned them, so everything rendered on
 * screen is traceable to a response.
 */

export interface LonLat {
  lon: number;
  lat: number;
}

export interface HealthBody {
  status: string;
  version: number;
  scenario_name: string | null;
}

export interface FloodFeature {
  type: "Feature";
  geometry: { type: "Polygon"; coordinates: number[][][] };
  properties: { source: string };
}

export interface FloodBody {
  type: "FeatureCollection";
  features: FloodFeature[];
  version: number;
}

export interface RouteFeature {
  type: "Feature";
  geometry: { type: "LineString"; coordinates: number[][] } | null;
  properties: Record<string, unknown>;
}

export interface RouteGeojson {
  type: "FeatureCollection";
  features: RouteFeature[];
}

export interface RouteBody {
  route: RouteGeojson | null;
  reason?: string;
  origin_node?: string;
  destination_node?: string;
  version: number;
}

export interface LodgingRecord {
  id: string;
  name: string;
  kind: string;
  flooded: boolean;
  reachable: boolean;
  route_length_m: number | null;
  snap_node: string | null;
}

export interface LodgingBody {
  options: LodgingRecord[] | null;
  reason?: string;
  origin_node?: string;
  version: number;
}

/** Error whose message is the service's own `error` string, verbatim,
 * so banners never paraphrase the service. */
export class ServiceError extends Error {}

export interface LoadBody {
  status: string;
  version: number;
  scenario_name: string;
}

/** Narrow structural view of fetch; lets tests substitute a fake without
 * building full Response objects. */
export type FetchLike = (
  url: string,
  init?: {
    method?: string;
    headers?: Record<string, string>;
    body?: string;
    signal?: AbortSignal;
  },
) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

function formatPoint(point: LonLat): string {
  return `${point.lon},${point.lat}`;
}

export class ServiceClient {
  private readonly fetchFn: FetchLike;

  constructor(
    readonly baseUrl: string,
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  private async request(
    path: string,
    params: Record<string, string>,
    init: { method?: string; headers?: Record<string, string>; body?: string; signal?: AbortSignal },
  ): Promise<unknown> {
    const url = new URL(path, this.baseUrl);
    for (const [key, value] of Object.entries(params)) {
      url.searchParams.set(key, value);
    }
    let response;
    try {
      response = await this.fetchFn(url.toString(), init);
    } catch (err) {
      if (init.signal?.aborted) {
        throw err;
      }
      const detail = err instanceof Error ? err.message : String(err);
      throw new ServiceError(`service unreachable: ${detail}`);
    }
    const body = await response.json().catch(() => null);
    if (!response.ok) {
      const error =
        body !== null && typeof body === "object" && "error" in body
          ? String((body as { error: unknown }).error)
          : `HTTP ${response.status}`;
      throw new ServiceError(error);
    }
    return body;
  }

  async health(): Promise<HealthBody> {
    return (await this.request("/health", {}, {})) as HealthBody;
  }

  async load(manifestPath: string): Promise<LoadBody> {
    return (await this.request(
      "/load",
      {},
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ manifest_path: manifestPath }),
      },
    )) as LoadBody;
  }

  async flood(levelFt: number | null = null): Promise<FloodBody> {
    const params: Record<string, string> = {};
    if (levelFt !== null) {
      params["level_ft"] = String(levelFt);
    }
    return (await this.request("/flood", params, {})) as FloodBody;
  }

  async route(
    origin: LonLat,
    destination: LonLat,
    closedEdges: readonly string[],
    signal?: AbortSignal,
  ): Promise<RouteBody> {
    const params: Record<string, string> = {
      from: formatPoint(origin),
      to: formatPoint(destination),
    };
    if (closedEdges.length > 0) {
      params["close"] = closedEdges.join(",");
    }
    return (await this.request("/route", params, { signal })) as RouteBody;
  }

  async lodging(origin: LonLat): Promise<LodgingBody> {
    return (await this.request("/lodging", { from: formatPoint(origin) }, {})) as LodgingBody;
  }
}
