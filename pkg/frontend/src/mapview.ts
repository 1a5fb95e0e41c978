import * as L from "leaflet";
import type { FeatureCollection } from "geojson";
import { FloodBody, LonLat, RouteGeojson } from "./api.js";

export interface MapViewOptions {
  center: LonLat;
  zoom: number;
  tileUrl: string;
  tileAttribution: string;
}

// Figure-style defaults: route in yellow, destination/shelter in purple.
const ROUTE_STYLE: L.PathOptions = {
  color: "#f5c211",
  weight: 5,
  opacity: 0.9,
  className: "route-line",
};

const FLOOD_STYLE: L.PathOptions = {
  color: "#1f78b4",
  weight: 1,
  fillColor: "#1f78b4",
  fillOpacity: 0.45,
  className: "flood-cell",
};

/** Leaflet wrapper that draws service responses and nothing else.
 *
 * The last body handed to each layer is kept so tests can audit that
 * rendered geometry came from a response verbatim.
 */
export class MapView {
  readonly map: L.Map;
  lastFlood: FloodBody | null = null;
  lastRoute: RouteGeojson | null = null;

  private floodLayer: L.GeoJSON | null = null;
  private routeLayer: L.GeoJSON | null = null;
  private originMarker: L.CircleMarker | null = null;
  private destinationMarker: L.CircleMarker | null = null;
  private lastOrigin: LonLat | null = null;
  private lastDestination: LonLat | null = null;

  constructor(container: HTMLElement, options: MapViewOptions) {
    this.map = L.map(container, {
      center: [options.center.lat, options.center.lon],
      zoom: options.zoom,
      zoomAnimation: false,
      fadeAnimation: false,
      markerZoomAnimation: false,
    });
    L.tileLayer(options.tileUrl, { attribution: options.tileAttribution }).addTo(this.map);
  }

  onClick(handler: (point: LonLat) => void): void {
    this.map.on("click", (event: L.LeafletMouseEvent) => {
      handler({ lon: event.latlng.lng, lat: event.latlng.lat });
    });
  }

  setFlood(flood: FloodBody | null): void {
    if (flood === this.lastFlood) {
      return;
    }
    if (this.floodLayer !== null) {
      this.map.removeLayer(this.floodLayer);
      this.floodLayer = null;
    }
    this.lastFlood = flood;
    if (flood === null) {
      return;
    }
    this.floodLayer = L.geoJSON(flood as FeatureCollection, {
      style: FLOOD_STYLE,
      interactive: false,
    }).addTo(this.map);
  }

  setRoute(route: RouteGeojson | null): void {
    if (route === this.lastRoute) {
      return;
    }
    if (this.routeLayer !== null) {
      this.map.removeLayer(this.routeLayer);
      this.routeLayer = null;
    }
    this.lastRoute = route;
    if (route === null) {
      return;
    }
    // The summary feature carries no geometry; only the legs are drawn.
    const legs = {
      type: "FeatureCollection",
      features: route.features.filter((feature) => feature.geometry !== null),
    };
    this.routeLayer = L.geoJSON(legs as FeatureCollection, {
      style: ROUTE_STYLE,
      interactive: false,
    }).addTo(this.map);
  }

  setOrigin(point: LonLat | null): void {
    if (point === this.lastOrigin) {
      return;
    }
    this.lastOrigin = point;
    this.originMarker = this.replaceMarker(this.originMarker, point, {
      radius: 7,
      color: "#2a2a2a",
      fillColor: "#ffffff",
      fillOpacity: 1,
      className: "origin-marker",
    });
  }

  setDestination(point: LonLat | null): void {
    if (point === this.lastDestination) {
      return;
    }
    this.lastDestination = point;
    this.destinationMarker = this.replaceMarker(this.destinationMarker, point, {
      radius: 7,
      color: "#5b2a86",
      fillColor: "#8e44ad",
      fillOpacity: 1,
      className: "destination-marker",
    });
  }

  private replaceMarker(
    marker: L.CircleMarker | null,
    point: LonLat | null,
    style: L.CircleMarkerOptions,
  ): L.CircleMarker | null {
    if (marker !== null) {
      this.map.removeLayer(marker);
    }
    if (point === null) {
      return null;
    }
    return L.circleMarker([point.lat, point.lon], {
      ...style,
      interactive: false,
    }).addTo(this.map);
  }
}
