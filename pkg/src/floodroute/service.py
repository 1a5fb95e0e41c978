"""HTTP service over a loaded scenario: flood layers, routing, lodging.

State is a single atomically swapped (scenario, overlay, version) triple.
Every request takes one snapshot up front and computes against it, so a
reload landing mid-request cannot tear a response; the version tag in each
body names the snapshot it came from. Read endpoints never mutate state.

Bodies are canonical JSON (sorted keys, compact separators, trailing
newline), which makes responses byte-deterministic for a fixed version and
request.
"""

from __future__ import annotations

import json
import math
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlsplit

from .errors import FloodRouteError
from .inundation import FloodMask, feet_to_meters
from .lodging import filter_lodging, rank_lodging
from .roadnet import nearest_node
from .routing import RouteRequest, route_to_geojson, shortest_route
from .scenario import Scenario, fused_mask_at, load_scenario, prepare_overlay

__all__ = [
    "ServiceState",
    "health_body",
    "flood_body",
    "route_body",
    "lodging_body",
    "make_server",
    "canonical_body",
]


class ServiceState:
    """Atomic scenario holder with a monotonically increasing load counter.

    The version increments exactly once per successful load; a failed load
    leaves the previous state fully intact.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._load_lock = threading.Lock()
        self._active: tuple[Scenario, object, int] | None = None
        self._version = 0

    def snapshot(self):
        """(scenario, overlay, version) as one consistent triple."""
        with self._lock:
            if self._active is None:
                return None, None, self._version
            return self._active

    @property
    def version(self) -> int:
        with self._lock:
            return self._version

    def load(self, manifest_path: str | Path) -> tuple[int, str]:
        """Load and swap in a scenario; returns (version, scenario name).

        Loads are single-flight; readers keep serving the old snapshot
        until the swap happens.
        """
        with self._load_lock:
            scenario = load_scenario(manifest_path)
            overlay = prepare_overlay(scenario)
            with self._lock:
                self._version += 1
                self._active = (scenario, overlay, self._version)
                return self._version, scenario.name


# --- body builders ----------------------------------------------------------


def canonical_body(body: dict) -> bytes:
    return (json.dumps(body, sort_keys=True, separators=(",", ":")) + "\n").encode("utf-8")


def health_body(scenario: Scenario | None, version: int) -> dict:
    return {
        "status": "ok",
        "version": version,
        "scenario_name": None if scenario is None else scenario.name,
    }


def _cell_feature(geometry, cell) -> dict:
    cs = geometry.cell_size
    x0 = geometry.x_origin + cell.col * cs
    y0 = geometry.y_origin + cell.row * cs
    # Exterior ring counterclockwise and closed, per GeoJSON.
    ring = [[x0, y0], [x0 + cs, y0], [x0 + cs, y0 + cs], [x0, y0 + cs], [x0, y0]]
    return {
        "type": "Feature",
        "geometry": {"type": "Polygon", "coordinates": [ring]},
        "properties": {"source": "fused"},
    }


def flood_body(scenario: Scenario, version: int, level_ft: float | None = None) -> dict:
    """Flooded cells of the fused mask as cell-footprint polygons.

    A level override recomputes the DEM-model component at that stage
    without touching stored state. Features come out in row-major order.
    """
    if level_ft is None:
        mask: FloodMask = scenario.fused_mask
    else:
        mask = fused_mask_at(scenario, feet_to_meters(level_ft))
    features = [_cell_feature(mask.geometry, cell) for cell in mask.flooded_cells()]
    return {"type": "FeatureCollection", "features": features, "version": version}


def route_body(
    scenario: Scenario,
    overlay,
    version: int,
    origin: tuple[float, float],
    destination: tuple[float, float],
    closed_edges: frozenset[str] = frozenset(),
) -> dict:
    """Snap both points, route, and wrap the GeoJSON; unroutable outcomes
    are structured results, not errors."""
    radius = scenario.params.snap_radius_m
    origin_node = nearest_node(scenario.graph, origin[0], origin[1], radius)
    destination_node = nearest_node(scenario.graph, destination[0], destination[1], radius)
    if origin_node is None or destination_node is None:
        return {"route": None, "reason": "no_nearby_road", "version": version}
    request = RouteRequest(
        origin_node=origin_node,
        destination_node=destination_node,
        closed_edges=frozenset(closed_edges),
    )
    route = shortest_route(scenario.graph, overlay, request)
    if route is None:
        return {"route": None, "reason": "unreachable", "version": version}
    return {
        "route": json.loads(route_to_geojson(route, scenario.graph)),
        "origin_node": origin_node,
        "destination_node": destination_node,
        "version": version,
    }


def lodging_body(
    scenario: Scenario, overlay, version: int, origin: tuple[float, float]
) -> dict:
    """filter_lodging over the fused mask, then rank_lodging from the
    snapped origin."""
    radius = scenario.params.snap_radius_m
    origin_node = nearest_node(scenario.graph, origin[0], origin[1], radius)
    if origin_node is None:
        return {"options": None, "reason": "no_nearby_road", "version": version}
    dry = filter_lodging(list(scenario.pois), scenario.fused_mask)
    options = rank_lodging(dry, scenario.graph, overlay, origin_node, radius)
    return {
        "options": [option.record() for option in options],
        "origin_node": origin_node,
        "version": version,
    }


# --- HTTP layer -------------------------------------------------------------


def _parse_point(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected LON,LAT, got {text!r}")
    lon, lat = (float(p) for p in parts)
    if not (math.isfinite(lon) and math.isfinite(lat)):
        raise ValueError(f"coordinates must be finite, got {text!r}")
    return lon, lat


def _parse_close(values: list[str]) -> frozenset[str]:
    edges = set()
    for value in values:
        edges.update(part for part in value.split(",") if part)
    return frozenset(edges)


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    def log_message(self, format, *args):
        pass

    # -- plumbing --

    def _send(self, status: int, body: dict):
        data = canonical_body(body)
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(data)

    def _read_body(self) -> bytes:
        length = int(self.headers.get("Content-Length") or 0)
        return self.rfile.read(length) if length else b""

    # -- verbs --

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_POST(self):
        url = urlsplit(self.path)
        if url.path != "/load":
            self._send(404, {"error": "not found", "version": self.server.state.version})
            return
        version = self.server.state.version
        try:
            payload = json.loads(self._read_body() or b"{}")
            manifest_path = payload["manifest_path"]
        except (json.JSONDecodeError, KeyError, TypeError):
            self._send(
                400,
                {"error": "body must be JSON with manifest_path", "version": version},
            )
            return
        try:
            new_version, name = self.server.state.load(manifest_path)
        except FloodRouteError as exc:
            self._send(400, {"error": str(exc), "version": version})
            return
        self._send(
            200, {"status": "loaded", "version": new_version, "scenario_name": name}
        )

    def do_GET(self):
        url = urlsplit(self.path)
        query = parse_qs(url.query)
        scenario, overlay, version = self.server.state.snapshot()

        if url.path == "/health":
            self._send(200, health_body(scenario, version))
            return
        if url.path not in ("/flood", "/route", "/lodging"):
            self._send(404, {"error": "not found", "version": version})
            return
        if scenario is None:
            self._send(409, {"error": "no scenario", "version": version})
            return

        try:
            if url.path == "/flood":
                level_ft = None
                if "level_ft" in query:
                    level_ft = float(query["level_ft"][0])
                    if not math.isfinite(level_ft):
                        raise ValueError("level_ft must be finite")
                self._send(200, flood_body(scenario, version, level_ft))
            elif url.path == "/route":
                origin = _parse_point(query["from"][0])
                destination = _parse_point(query["to"][0])
                closed = _parse_close(query.get("close", []))
                self._send(
                    200, route_body(scenario, overlay, version, origin, destination, closed)
                )
            else:
                origin = _parse_point(query["from"][0])
                self._send(200, lodging_body(scenario, overlay, version, origin))
        except KeyError as exc:
            self._send(400, {"error": f"missing query parameter {exc}", "version": version})
        except ValueError as exc:
            self._send(400, {"error": str(exc), "version": version})


class _Server(ThreadingHTTPServer):
    daemon_threads = True
    # The default listen backlog of 5 drops handshakes under bursts of
    # concurrent clients, which surfaces as connection resets.
    request_queue_size = 128


def make_server(host: str, port: int, state: ServiceState) -> ThreadingHTTPServer:
    """Bind a threaded server; the caller owns serve_forever/shutdown."""
    server = _Server((host, port), _Handler)
    server.state = state
    return server
