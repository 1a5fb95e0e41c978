import { describe, expect, test } from "vitest";

import { ServiceClient } from "../src/api.js";
import type { LodgingBody, LodgingRecord } from "../src/api.js";
import { UiSession } from "../src/session.js";
import { floodBody, hangUntilAborted, mockFetch, routeBody, EAST, LEGS, WEST } from "./helpers.js";
import type { Leg } from "./helpers.js";
import type { MockHandler } from "./helpers.js";

function sessionWith(handler: MockHandler) {
  const { fetchFn, requests } = mockFetch(handler);
  const session = new UiSession(new ServiceClient("http://svc.test", fetchFn));
  return { session, requests };
}

const okHandler: MockHandler = (url) => {
  if (url.pathname === "/health") {
    return { status: 200, body: { status: "ok", version: 1, scenario_name: "synthetic-valley" } };
  }
  if (url.pathname === "/load") {
    return { status: 200, body: { status: "loaded", version: 2, scenario_name: "coastal-town" } };
  }
  if (url.pathname === "/flood") {
    return { status: 200, body: floodBody(3) };
  }
  if (url.pathname === "/route") {
    return { status: 200, body: routeBody(LEGS) };
  }
  throw new Error(`unexpected path ${url.pathname}`);
};

describe("click flow", () => {
  test("three clicks: origin, destination with route, then reset", async () => {
    const { session, requests } = sessionWith(okHandler);
    expect(session.phase).toBe("await-origin");

    await session.selectPoint(WEST);
    expect(session.phase).toBe("await-destination");
    expect(session.origin).toEqual(WEST);
    expect(requests).toHaveLength(0);

    await session.selectPoint(EAST);
    expect(session.phase).toBe("routed");
    expect(session.destination).toEqual(EAST);
    expect(session.route?.route?.features).toHaveLength(3);
    expect(session.routeEdgeIds()).toEqual(["ab", "bc"]);
    const routeUrl = requests[0]!.url;
    expect(routeUrl.pathname).toBe("/route");
    expect(routeUrl.searchParams.get("from")).toBe("-79.195,34.625");
    expect(routeUrl.searchParams.get("to")).toBe("-78.805,34.625");

    const fresh = { lon: -79.0, lat: 34.5 };
    await session.selectPoint(fresh);
    expect(session.phase).toBe("await-destination");
    expect(session.origin).toEqual(fresh);
    expect(session.destination).toBeNull();
    expect(session.route).toBeNull();
    expect(session.lodging).toBeNull();
    expect(requests).toHaveLength(1);
  });

  test("unreachable destination surfaces the reason and keeps route null", async () => {
    const { session } = sessionWith((url) =>
      url.pathname === "/route"
        ? { status: 200, body: { route: null, reason: "unreachable", version: 1 } }
        : { status: 200, body: {} },
    );
    await session.selectPoint(WEST);
    await session.selectPoint(EAST);
    expect(session.route).toBeNull();
    expect(session.error).toBe("unreachable");
    expect(session.phase).toBe("routed");
  });

  test("route request failures surface the service error verbatim", async () => {
    const { session } = sessionWith((url) =>
      url.pathname === "/route"
        ? { status: 400, body: { error: "unknown closed edge 'zz'", version: 1 } }
        : { status: 200, body: {} },
    );
    await session.selectPoint(WEST);
    await session.selectPoint(EAST);
    expect(session.route).toBeNull();
    expect(session.error).toBe("unknown closed edge 'zz'");
  });

  test("a reset during an in-flight request aborts it and a newer route wins", async () => {
    let hung = 0;
    const { session, requests } = sessionWith((url, signal) => {
      if (url.pathname !== "/route") {
        return { status: 200, body: {} };
      }
      if (requests.filter((r) => r.url.pathname === "/route").length === 1) {
        hung += 1;
        return hangUntilAborted(signal).then(() => ({ status: 200, body: {} }));
      }
      return { status: 200, body: routeBody(LEGS) };
    });

    await session.selectPoint(WEST);
    const first = session.selectPoint(EAST); // hangs until aborted
    await Promise.resolve();
    const reset = session.selectPoint(WEST); // third click: reset + abort
    await session.selectPoint(EAST); // fourth click: fresh destination
    await Promise.all([first, reset]);

    expect(hung).toBe(1);
    expect(requests[0]!.signal?.aborted).toBe(true);
    expect(session.routeEdgeIds()).toEqual(["ab", "bc"]);
    expect(session.error).toBeNull();
  });
});

describe("flood layer toggle", () => {
  test("enable, disable, enable fetches exactly twice", async () => {
    const { session, requests } = sessionWith(okHandler);
    await session.toggleFloodLayer();
    expect(session.floodLayerOn).toBe(true);
    expect(session.flood?.features).toHaveLength(3);

    await session.toggleFloodLayer();
    expect(session.floodLayerOn).toBe(false);
    expect(session.flood).toBeNull();

    await session.toggleFloodLayer();
    expect(session.floodLayerOn).toBe(true);

    const floodRequests = requests.filter((r) => r.url.pathname === "/flood");
    expect(floodRequests).toHaveLength(2);
  });

  test("stage override is forwarded as level_ft", async () => {
    const { session, requests } = sessionWith(okHandler);
    await session.toggleFloodLayer(13);
    expect(requests[0]!.url.searchParams.get("level_ft")).toBe("13");
    await session.toggleFloodLayer();
    await session.toggleFloodLayer(null);
    expect(requests[1]!.url.searchParams.has("level_ft")).toBe(false);
  });

  test("a failed fetch leaves the toggle off and shows the error", async () => {
    const { session } = sessionWith((url) =>
      url.pathname === "/flood"
        ? { status: 400, body: { error: "level_ft must be finite", version: 1 } }
        : { status: 200, body: {} },
    );
    await session.toggleFloodLayer(Infinity);
    expect(session.floodLayerOn).toBe(false);
    expect(session.flood).toBeNull();
    expect(session.error).toBe("level_ft must be finite");
  });

  test("network failures are reported without changing toggle state", async () => {
    const { session } = sessionWith(() => {
      throw new Error("connect ECONNREFUSED");
    });
    await session.toggleFloodLayer();
    expect(session.floodLayerOn).toBe(false);
    expect(session.error).toBe("service unreachable: connect ECONNREFUSED");
  });
});

describe("operator closures", () => {
  async function routedSession(handler: MockHandler) {
    const made = sessionWith(handler);
    await made.session.selectPoint(WEST);
    await made.session.selectPoint(EAST);
    return made;
  }

  test("closing an on-route edge requests the backup with the closure", async () => {
    const backup: Leg[] = [{ id: "ac", coords: [[0, 0], [2, 0]], length: 2500 }];
    const { session, requests } = await routedSession((url) => {
      if (url.pathname !== "/route") {
        return { status: 200, body: {} };
      }
      const close = url.searchParams.get("close");
      return { status: 200, body: routeBody(close === null ? LEGS : backup) };
    });

    expect(session.canCloseEdge("ab")).toBe(true);
    expect(session.canCloseEdge("zz")).toBe(false);
    await session.markEdgeClosed("ab");

    expect(requests.at(-1)!.url.searchParams.get("close")).toBe("ab");
    expect(session.routeEdgeIds()).toEqual(["ac"]);
    expect([...session.closedEdges]).toEqual(["ab"]);
  });

  test("closing an off-route edge is rejected locally", async () => {
    const { session, requests } = await routedSession(okHandler);
    const before = requests.length;
    await expect(session.markEdgeClosed("zz")).rejects.toThrow("not on the current route");
    expect(requests).toHaveLength(before);
    expect(session.closedEdges.size).toBe(0);
  });

  test("a transport failure rolls the closure back and keeps the route", async () => {
    let calls = 0;
    const { session } = await routedSession((url) => {
      if (url.pathname !== "/route") {
        return { status: 200, body: {} };
      }
      calls += 1;
      if (calls === 1) {
        return { status: 200, body: routeBody(LEGS) };
      }
      throw new Error("socket hang up");
    });

    await session.markEdgeClosed("ab");
    expect(session.error).toBe("service unreachable: socket hang up");
    expect(session.routeEdgeIds()).toEqual(["ab", "bc"]);
    expect(session.closedEdges.size).toBe(0);
  });

  test("severing the last path reports unreachable and clears the line", async () => {
    const { session } = await routedSession((url) => {
      if (url.pathname !== "/route") {
        return { status: 200, body: {} };
      }
      if (url.searchParams.get("close") === null) {
        return { status: 200, body: routeBody(LEGS) };
      }
      return { status: 200, body: { route: null, reason: "unreachable", version: 1 } };
    });

    await session.markEdgeClosed("bc");
    expect(session.route).toBeNull();
    expect(session.error).toBe("unreachable");
    expect([...session.closedEdges]).toEqual(["bc"]);
  });
});

describe("lodging panel", () => {
  const OPTIONS: LodgingRecord[] = [
    {
      id: "shelter-a",
      name: "West Shelter",
      kind: "shelter",
      flooded: false,
      reachable: true,
      route_length_m: 4400,
      snap_node: "n1",
    },
    {
      id: "inn-b",
      name: "Ridge Inn",
      kind: "lodging",
      flooded: false,
      reachable: false,
      route_length_m: null,
      snap_node: null,
    },
  ];

  test("options are kept in service order", async () => {
    const body: LodgingBody = { options: OPTIONS, origin_node: "a", version: 1 };
    const { session, requests } = sessionWith((url) =>
      url.pathname === "/lodging" ? { status: 200, body } : { status: 200, body: {} },
    );
    await session.selectPoint(WEST);
    await session.showLodging();
    expect(session.lodging).toEqual(OPTIONS);
    expect(requests.at(-1)!.url.searchParams.get("from")).toBe("-79.195,34.625");
  });

  test("an empty list is a valid state, not an error", async () => {
    const { session } = sessionWith((url) =>
      url.pathname === "/lodging"
        ? { status: 200, body: { options: [], origin_node: "a", version: 1 } }
        : { status: 200, body: {} },
    );
    await session.selectPoint(WEST);
    await session.showLodging();
    expect(session.lodging).toEqual([]);
    expect(session.error).toBeNull();
  });

  test("an unsnappable origin surfaces the service reason", async () => {
    const { session } = sessionWith((url) =>
      url.pathname === "/lodging"
        ? { status: 200, body: { options: null, reason: "no_nearby_road", version: 1 } }
        : { status: 200, body: {} },
    );
    await session.selectPoint({ lon: -70, lat: 30 });
    await session.showLodging();
    expect(session.lodging).toBeNull();
    expect(session.error).toBe("no_nearby_road");
  });

  test("lodging requires an origin", async () => {
    const { session } = sessionWith(okHandler);
    await expect(session.showLodging()).rejects.toThrow("origin not set");
  });
});

describe("scenario loading", () => {
  test("a successful load resets the whole session", async () => {
    const { session, requests } = sessionWith(okHandler);
    await session.selectPoint(WEST);
    await session.selectPoint(EAST);
    await session.markEdgeClosed("ab");
    await session.toggleFloodLayer();
    expect(session.closedEdges.size).toBe(1);

    await session.loadScenario("/data/coastal/manifest.json");

    const load = requests.find((r) => r.url.pathname === "/load")!;
    expect(load.method).toBe("POST");
    expect(JSON.parse(load.body!)).toEqual({ manifest_path: "/data/coastal/manifest.json" });

    expect(session.scenarioName).toBe("coastal-town");
    expect(session.phase).toBe("await-origin");
    expect(session.origin).toBeNull();
    expect(session.destination).toBeNull();
    expect(session.route).toBeNull();
    expect(session.lodging).toBeNull();
    expect(session.floodLayerOn).toBe(false);
    expect(session.flood).toBeNull();
    expect(session.closedEdges.size).toBe(0);
    expect(session.error).toBeNull();
  });

  test("a failed load keeps the session and banners the loader's text", async () => {
    const { session } = sessionWith((url) =>
      url.pathname === "/load"
        ? { status: 400, body: { error: "dem: no such file", version: 1 } }
        : okHandler(url, undefined),
    );
    await session.connect();
    await session.selectPoint(WEST);
    await session.selectPoint(EAST);

    await session.loadScenario("/bad/manifest.json");

    expect(session.error).toBe("dem: no such file");
    expect(session.scenarioName).toBe("synthetic-valley");
    expect(session.routeEdgeIds()).toEqual(["ab", "bc"]);
    expect(session.phase).toBe("routed");
  });
});

describe("connect", () => {
  test("picks up the scenario name from health", async () => {
    const { session } = sessionWith(okHandler);
    await session.connect();
    expect(session.scenarioName).toBe("synthetic-valley");
    expect(session.error).toBeNull();
  });

  test("an unreachable service is reported", async () => {
    const { session } = sessionWith(() => {
      throw new Error("connect ECONNREFUSED");
    });
    await session.connect();
    expect(session.error).toBe("service unreachable: connect ECONNREFUSED");
  });
});
