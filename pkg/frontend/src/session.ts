import {
  LodgingRecord,
  LonLat,
  RouteBody,
  FloodBody,
  ServiceClient,
} from "./api.js";

/** Interaction stage: the three-click flow in order. */
export type Phase = "await-origin" | "await-destination" | "routed";

export type SessionListener = () => void;

type RouteOutcome = "ok" | "no-route" | "failed" | "superseded";

function messageOf(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}

/** Operator session state.
 *
 * All geometry and ordering comes from service responses; the session
 * only sequences requests and records outcomes. The route field is
 * non-null exactly when both clicks are set and the last route request
 * succeeded with a usable route.
 */
export class UiSession {
  phase: Phase = "await-origin";
  origin: LonLat | null = null;
  destination: LonLat | null = null;
  floodLayerOn = false;
  flood: FloodBody | null = null;
  route: RouteBody | null = null;
  lodging: LodgingRecord[] | null = null;
  readonly closedEdges = new Set<string>();
  /** Last error banner text, verbatim from the service; null when clear. */
  error: string | null = null;
  scenarioName: string | null = null;

  private readonly listeners: SessionListener[] = [];
  private inflight: AbortController | null = null;

  constructor(private readonly client: ServiceClient) {}

  onChange(listener: SessionListener): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) {
      listener();
    }
  }

  /** Probe the service and pick up the active scenario name. */
  async connect(): Promise<void> {
    try {
      const body = await this.client.health();
      this.scenarioName = body.scenario_name;
    } catch (err) {
      this.error = messageOf(err);
    }
    this.notify();
  }

  /** Swap the active scenario on the service. Success resets the whole
   * session (clicks, route, layer, closures all referenced the replaced
   * scenario); failure keeps the old scenario serving and banners the
   * loader's error text. */
  async loadScenario(manifestPath: string): Promise<void> {
    try {
      const body = await this.client.load(manifestPath);
      this.inflight?.abort();
      this.inflight = null;
      this.scenarioName = body.scenario_name;
      this.phase = "await-origin";
      this.origin = null;
      this.destination = null;
      this.route = null;
      this.lodging = null;
      this.floodLayerOn = false;
      this.flood = null;
      this.closedEdges.clear();
      this.error = null;
    } catch (err) {
      this.error = messageOf(err);
    }
    this.notify();
  }

  /** Show or hide the flood layer. Enabling fetches the current flood
   * polygons (optionally at a stage override in feet); disabling only
   * drops the layer. A failed fetch leaves the toggle off. */
  async toggleFloodLayer(levelFt: number | null = null): Promise<void> {
    if (this.floodLayerOn) {
      this.floodLayerOn = false;
      this.flood = null;
      this.notify();
      return;
    }
    try {
      const body = await this.client.flood(levelFt);
      this.flood = body;
      this.floodLayerOn = true;
      this.error = null;
    } catch (err) {
      this.error = messageOf(err);
    }
    this.notify();
  }

  /** Advance the click flow: first click fixes the origin, the second
   * fixes the destination and requests a route, and a third click starts
   * over from a fresh origin. */
  async selectPoint(point: LonLat): Promise<void> {
    if (this.phase === "await-origin") {
      this.origin = point;
      this.phase = "await-destination";
      this.notify();
      return;
    }
    if (this.phase === "routed") {
      this.inflight?.abort();
      this.inflight = null;
      this.origin = point;
      this.destination = null;
      this.route = null;
      this.lodging = null;
      this.phase = "await-destination";
      this.notify();
      return;
    }
    this.destination = point;
    this.phase = "routed";
    this.notify();
    await this.requestRoute(false);
  }

  /** Edge ids of the current route, in traversal order. */
  routeEdgeIds(): string[] {
    if (this.route?.route == null) {
      return [];
    }
    return this.route.route.features
      .filter((feature) => feature.geometry !== null)
      .map((feature) => String(feature.properties["edge_id"]));
  }

  canCloseEdge(edgeId: string): boolean {
    return this.routeEdgeIds().includes(edgeId);
  }

  /** Mark an on-route edge as impassable and request the backup route.
   * If the request never reaches the service the closure is rolled back
   * and the previous route stays on screen. */
  async markEdgeClosed(edgeId: string): Promise<void> {
    if (!this.canCloseEdge(edgeId)) {
      throw new Error(`edge ${edgeId} is not on the current route`);
    }
    this.closedEdges.add(edgeId);
    this.notify();
    const outcome = await this.requestRoute(true);
    if (outcome === "failed") {
      this.closedEdges.delete(edgeId);
      this.notify();
    }
  }

  /** Fetch lodging options for the current origin. The service's order
   * is kept as-is; an empty list is a valid "nothing available" state. */
  async showLodging(): Promise<void> {
    if (this.origin === null) {
      throw new Error("origin not set");
    }
    try {
      const body = await this.client.lodging(this.origin);
      if (body.options === null) {
        this.lodging = null;
        this.error = body.reason ?? "lodging unavailable";
      } else {
        this.lodging = body.options;
        this.error = null;
      }
    } catch (err) {
      this.error = messageOf(err);
    }
    this.notify();
  }

  private async requestRoute(isReroute: boolean): Promise<RouteOutcome> {
    // At most one route request in flight: newer supersedes older.
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    const closed = [...this.closedEdges].sort();
    let body: RouteBody;
    try {
      body = await this.client.route(this.origin!, this.destination!, closed, controller.signal);
    } catch (err) {
      if (controller.signal.aborted) {
        return "superseded";
      }
      this.inflight = null;
      this.error = messageOf(err);
      if (!isReroute) {
        this.route = null;
      }
      this.notify();
      return "failed";
    }
    if (this.inflight !== controller) {
      return "superseded";
    }
    this.inflight = null;
    if (body.route === null) {
      this.route = null;
      this.error = body.reason ?? "no route";
      this.notify();
      return "no-route";
    }
    this.route = body;
    this.error = null;
    this.notify();
    return "ok";
  }
}
