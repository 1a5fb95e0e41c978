/** Runtime configuration: where the routing service lives and where the
 * map opens. Everything can be overridden from the page query string so
 * the same build works against any deployment. */

export interface AppConfig {
  serviceUrl: string;
  center: { lon: number; lat: number };
  zoom: number;
  tileUrl: string;
  tileAttribution: string;
}

export const DEFAULT_CONFIG: AppConfig = {
  serviceUrl: "http://127.0.0.1:8080",
  // Opens over the bundled valley scenario (Lumber River latitudes).
  center: { lon: -79.0, lat: 34.55 },
  zoom: 11,
  tileUrl: "https://{s}.tile.openstreetmap.org/{z}/{x}/{y}.png",
  tileAttribution: "&copy; OpenStreetMap contributors",
};

/** Apply `?service=`, `?lon=`, `?lat=`, and `?zoom=` overrides from a
 * query string. Unparseable numbers fall back to the defaults. */
export function configFromQuery(search: string): AppConfig {
  const params = new URLSearchParams(search);
  const config = { ...DEFAULT_CONFIG, center: { ...DEFAULT_CONFIG.center } };
  const service = params.get("service");
  if (service) {
    config.serviceUrl = service;
  }
  const lon = Number(params.get("lon"));
  const lat = Number(params.get("lat"));
  if (params.has("lon") && params.has("lat") && Number.isFinite(lon) && Number.isFinite(lat)) {
    config.center = { lon, lat };
  }
  const zoom = Number(params.get("zoom"));
  if (params.has("zoom") && Number.isInteger(zoom) && zoom >= 0) {
    config.zoom = zoom;
  }
  return config;
}
