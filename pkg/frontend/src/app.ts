import { FetchLike, ServiceClient } from "./api.js";
import { AppConfig } from "./config.js";
import { MapView } from "./mapview.js";
import { UiSession } from "./session.js";

export interface App {
  root: HTMLElement;
  session: UiSession;
  mapView: MapView;
}

const SCAFFOLD = `
  <div id="map"></div>
  <aside id="panel">
    <div id="banner" class="hidden"></div>
    <section>
      <button id="flood-toggle" type="button" aria-pressed="false">flood layer</button>
      <label>stage override (ft)
        <input id="flood-level" type="number" step="any" placeholder="scenario level">
      </label>
    </section>
    <section>
      <p id="phase"></p>
      <p id="route-length"></p>
      <ul id="route-edges"></ul>
      <label>close edge
        <input id="close-edge-id" type="text" placeholder="edge id">
      </label>
      <button id="close-edge" type="button" disabled>close and reroute</button>
    </section>
    <section>
      <button id="lodging-open" type="button" disabled>lodging options</button>
      <ol id="lodging-list"></ol>
    </section>
    <section>
      <label>scenario manifest
        <input id="manifest-path" type="text" placeholder="path on the service host">
      </label>
      <button id="load-scenario" type="button">load scenario</button>
    </section>
  </aside>
`;

function requireElement<T extends HTMLElement>(root: HTMLElement, selector: string): T {
  const el = root.querySelector<T>(selector);
  if (el === null) {
    throw new Error(`missing element ${selector}`);
  }
  return el;
}

function summaryLength(session: UiSession): number | null {
  const summary = session.route?.route?.features.find((feature) => feature.geometry === null);
  const length = summary?.properties["total_length_m"];
  return typeof length === "number" ? length : null;
}

/** Parse the stage override box: empty means "scenario default". */
function parseLevel(raw: string): number | null {
  const trimmed = raw.trim();
  if (trimmed === "") {
    return null;
  }
  const value = Number(trimmed);
  return Number.isFinite(value) ? value : null;
}

export function createApp(root: HTMLElement, config: AppConfig, fetchFn?: FetchLike): App {
  root.innerHTML = SCAFFOLD;

  const client = new ServiceClient(config.serviceUrl, fetchFn);
  const session = new UiSession(client);
  const mapView = new MapView(requireElement(root, "#map"), config);

  const banner = requireElement<HTMLElement>(root, "#banner");
  const floodToggle = requireElement<HTMLButtonElement>(root, "#flood-toggle");
  const floodLevel = requireElement<HTMLInputElement>(root, "#flood-level");
  const phase = requireElement<HTMLElement>(root, "#phase");
  const routeLength = requireElement<HTMLElement>(root, "#route-length");
  const routeEdges = requireElement<HTMLUListElement>(root, "#route-edges");
  const closeEdgeId = requireElement<HTMLInputElement>(root, "#close-edge-id");
  const closeEdge = requireElement<HTMLButtonElement>(root, "#close-edge");
  const lodgingOpen = requireElement<HTMLButtonElement>(root, "#lodging-open");
  const lodgingList = requireElement<HTMLOListElement>(root, "#lodging-list");
  const manifestPath = requireElement<HTMLInputElement>(root, "#manifest-path");
  const loadScenario = requireElement<HTMLButtonElement>(root, "#load-scenario");

  function renderLodging(): void {
    lodgingList.replaceChildren();
    if (session.lodging === null) {
      return;
    }
    if (session.lodging.length === 0) {
      const item = document.createElement("li");
      item.className = "placeholder";
      item.textContent = "no lodging available";
      lodgingList.append(item);
      return;
    }
    for (const option of session.lodging) {
      const item = document.createElement("li");
      item.className = "lodging-option";
      const pin = document.createElement("span");
      pin.className = "pin";
      const name = document.createElement("span");
      name.className = "lodging-name";
      name.textContent = option.name;
      const badge = document.createElement("span");
      badge.className = option.reachable ? "badge reachable" : "badge unreachable";
      badge.textContent = option.reachable ? "reachable" : "unreachable";
      item.append(pin, name, ` (${option.kind}) `, badge);
      if (option.reachable && option.route_length_m !== null) {
        const distance = document.createElement("span");
        distance.className = "lodging-distance";
        distance.textContent = ` ${Math.round(option.route_length_m)} m`;
        item.append(distance);
      }
      lodgingList.append(item);
    }
  }

  function renderRoutePanel(): void {
    const length = summaryLength(session);
    routeLength.textContent = length === null ? "" : `${Math.round(length)} m`;
    routeEdges.replaceChildren();
    for (const edgeId of session.routeEdgeIds()) {
      const item = document.createElement("li");
      const pick = document.createElement("button");
      pick.type = "button";
      pick.className = "route-edge";
      pick.dataset["edge"] = edgeId;
      pick.textContent = edgeId;
      item.append(pick);
      routeEdges.append(item);
    }
  }

  function render(): void {
    banner.textContent = session.error ?? "";
    banner.classList.toggle("hidden", session.error === null);

    floodToggle.textContent = session.scenarioName ?? "flood layer";
    floodToggle.setAttribute("aria-pressed", String(session.floodLayerOn));

    phase.textContent = session.phase;

    mapView.setFlood(session.floodLayerOn ? session.flood : null);
    mapView.setRoute(session.route?.route ?? null);
    mapView.setOrigin(session.origin);
    mapView.setDestination(session.destination);

    renderRoutePanel();
    renderLodging();

    closeEdge.disabled = !session.canCloseEdge(closeEdgeId.value.trim());
    lodgingOpen.disabled = session.origin === null;
  }

  mapView.onClick((point) => {
    void session.selectPoint(point);
  });
  floodToggle.addEventListener("click", () => {
    void session.toggleFloodLayer(parseLevel(floodLevel.value));
  });
  closeEdgeId.addEventListener("input", () => {
    closeEdge.disabled = !session.canCloseEdge(closeEdgeId.value.trim());
  });
  closeEdge.addEventListener("click", () => {
    const edgeId = closeEdgeId.value.trim();
    if (session.canCloseEdge(edgeId)) {
      void session.markEdgeClosed(edgeId);
    }
  });
  routeEdges.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const edgeId = target.dataset["edge"];
    if (edgeId !== undefined) {
      closeEdgeId.value = edgeId;
      closeEdge.disabled = !session.canCloseEdge(edgeId);
    }
  });
  lodgingOpen.addEventListener("click", () => {
    void session.showLodging();
  });
  loadScenario.addEventListener("click", () => {
    const path = manifestPath.value.trim();
    if (path !== "") {
      void session.loadScenario(path);
    }
  });

  session.onChange(render);
  render();
  void session.connect();

  return { root, session, mapView };
}
