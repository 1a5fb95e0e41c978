"""Command-line driver for every pipeline stage.

Exit codes: 0 success, 1 domain failure (unreachable destination, broken
input files), 2 usage errors (argparse rejections, malformed flag values).
Machine-readable results go to standard output as newline-terminated
canonical JSON; human summaries go to standard error, so pipelines can
consume stdout directly.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .errors import FloodRouteError, GridParseError
from .imagery import load_color_rules, classify_by_color, read_image, save_class_grid
from .inundation import (
    DEFAULT_SEED_FRACTION,
    connected_inundation,
    default_seeds,
    feet_to_meters,
    flooded_fraction,
    threshold_inundation,
)
from .raster import RasterGrid, load_ascii_grid, save_ascii_grid
from .roadnet import nearest_node
from .routing import RouteRequest, route_to_geojson, shortest_route
from .scenario import load_scenario, prepare_overlay
from .service import ServiceState, lodging_body, make_server

__all__ = ["main", "build_parser"]


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _emit(obj):
    sys.stdout.write(_canonical(obj))


def _note(text: str):
    print(text, file=sys.stderr)


def _lonlat(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected LON,LAT, got {text!r}")
    try:
        lon, lat = float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numeric LON,LAT, got {text!r}") from None
    if not (math.isfinite(lon) and math.isfinite(lat)):
        raise argparse.ArgumentTypeError(f"coordinates must be finite, got {text!r}")
    return lon, lat


def _listen(text: str) -> tuple[str, int]:
    host, sep, port_text = text.rpartition(":")
    if not sep or not host:
        raise argparse.ArgumentTypeError(f"expected ADDR:PORT, got {text!r}")
    try:
        port = int(port_text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"port must be an integer, got {port_text!r}") from None
    if not 0 < port < 65536:
        raise argparse.ArgumentTypeError(f"port out of range: {port}")
    return host, port


class _UsageError(Exception):
    """Bad input the parser cannot see itself; mapped to exit code 2."""


# --- subcommands -------------------------------------------------------------


def cmd_inundate(args) -> int:
    dem = load_ascii_grid(Path(args.dem).read_bytes())
    level_m = feet_to_meters(args.level_ft) if args.level_ft is not None else args.level_m
    if args.mode == "threshold":
        mask = threshold_inundation(dem, level_m)
    else:
        mask = connected_inundation(dem, level_m, default_seeds(dem, args.seeds_fraction))
    out_grid = RasterGrid(
        geometry=mask.geometry, values=mask.flooded.astype(float), nodata=-9999.0
    )
    Path(args.out).write_bytes(save_ascii_grid(out_grid))
    fraction = flooded_fraction(mask)
    _emit({"flooded_fraction": fraction})
    _note(f"wrote {args.out}: {mask.flooded.sum()} flooded cells ({fraction:.4f})")
    return 0


def cmd_classify(args) -> int:
    try:
        rules = load_color_rules(Path(args.rules).read_bytes())
    except GridParseError as exc:
        raise _UsageError(f"--rules: {exc}") from None
    image = read_image(args.image)
    grid = classify_by_color(image, rules)
    grid_bytes, legend_bytes = save_class_grid(grid)
    out = Path(args.out)
    out.write_bytes(grid_bytes)
    legend_path = out.with_suffix(".legend.json")
    legend_path.write_bytes(legend_bytes)
    counts = {}
    for code, name in sorted(grid.legend.items()):
        count = int((grid.classes == code).sum())
        if count:
            counts[name] = counts.get(name, 0) + count
    _emit({"class_counts": counts})
    _note(f"wrote {out} and {legend_path}")
    return 0


def cmd_overlay(args) -> int:
    scenario = load_scenario(args.scenario)
    overlay = prepare_overlay(scenario)
    blocked = overlay.blocked_ids()
    report = {
        "edges": dict(sorted(overlay.blocked.items())),
        "summary": {
            "blocked": len(blocked),
            "passable": len(overlay.blocked) - len(blocked),
            "total": len(overlay.blocked),
        },
    }
    Path(args.out).write_text(_canonical(report), encoding="utf-8")
    _emit(report)
    _note(f"{len(blocked)} of {len(overlay.blocked)} edges blocked")
    return 0


def cmd_route(args) -> int:
    scenario = load_scenario(args.scenario)
    overlay = prepare_overlay(scenario)
    radius = scenario.params.snap_radius_m
    origin_node = nearest_node(scenario.graph, args.origin[0], args.origin[1], radius)
    destination_node = nearest_node(scenario.graph, args.to[0], args.to[1], radius)
    if origin_node is None or destination_node is None:
        _emit({"route": None, "reason": "no_nearby_road"})
        _note("no_nearby_road: no graph node within the snap radius")
        return 1
    closed = frozenset(args.close or [])
    request = RouteRequest(origin_node, destination_node, closed)
    route = shortest_route(scenario.graph, overlay, request)
    if route is None:
        _emit({"route": None, "reason": "unreachable"})
        _note("unreachable: no passable path between the snapped nodes")
        return 1
    if args.geojson:
        Path(args.geojson).write_text(
            route_to_geojson(route, scenario.graph), encoding="utf-8"
        )
    _emit(
        {
            "node_ids": list(route.node_ids),
            "edge_ids": list(route.edge_ids),
            "total_cost": route.total_cost,
            "total_length_m": route.total_length_m,
            "origin_node": origin_node,
            "destination_node": destination_node,
        }
    )
    _note(
        f"route {origin_node} -> {destination_node}: "
        f"{len(route.edge_ids)} edges, {route.total_length_m:.0f} m"
    )
    return 0


def cmd_lodging(args) -> int:
    scenario = load_scenario(args.scenario)
    overlay = prepare_overlay(scenario)
    body = lodging_body(scenario, overlay, 0, args.origin)
    if body["options"] is None:
        _emit({"options": None, "reason": body["reason"]})
        _note(f"{body['reason']}: origin has no graph node within the snap radius")
        return 1
    _emit(body["options"])
    _note(f"{len(body['options'])} lodging options from {body['origin_node']}")
    return 0


def cmd_serve(args) -> int:
    state = ServiceState()
    state.load(args.scenario)
    host, port = args.listen
    server = make_server(host, port, state)
    _note(f"serving on {host}:{port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.shutdown()
        server.server_close()
    return 0


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="floodroute",
        description="Flood-aware evacuation routing: inundation, extraction, "
        "overlays, routing, lodging, and an HTTP service.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inundate", help="compute a flood mask from a DEM")
    p.add_argument("--dem", required=True, help="input DEM (ASCII grid)")
    level = p.add_mutually_exclusive_group(required=True)
    level.add_argument("--level-ft", type=float, help="water level in feet")
    level.add_argument("--level-m", type=float, help="water level in meters")
    p.add_argument(
        "--seeds-fraction",
        type=float,
        default=DEFAULT_SEED_FRACTION,
        help="fraction of lowest cells used as seeds (connected mode)",
    )
    p.add_argument(
        "--mode",
        choices=("threshold", "connected"),
        default="connected",
        help="bathtub threshold or seed-connected fill (default: connected)",
    )
    p.add_argument("--out", required=True, help="output mask (ASCII grid of 0/1)")
    p.set_defaults(func=cmd_inundate)

    p = sub.add_parser("classify", help="extract classes from an RGB map tile")
    p.add_argument("--image", required=True, help="input PPM image with .geom.json sidecar")
    p.add_argument("--rules", required=True, help="JSON list of color rules")
    p.add_argument("--out", required=True, help="output class grid (legend written beside it)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("overlay", help="report blocked edges for a scenario")
    p.add_argument("--scenario", required=True, help="scenario manifest path")
    p.add_argument("--out", required=True, help="output report JSON")
    p.set_defaults(func=cmd_overlay)

    p = sub.add_parser("route", help="shortest flood-safe route between two points")
    p.add_argument("--scenario", required=True, help="scenario manifest path")
    p.add_argument("--from", dest="origin", type=_lonlat, required=True, metavar="LON,LAT")
    p.add_argument("--to", dest="to", type=_lonlat, required=True, metavar="LON,LAT")
    p.add_argument(
        "--close",
        action="append",
        metavar="EDGE_ID",
        help="treat this edge as closed (repeatable)",
    )
    p.add_argument("--geojson", help="also write the route as GeoJSON to this path")
    p.set_defaults(func=cmd_route)

    p = sub.add_parser("lodging", help="list available lodging from a point")
    p.add_argument("--scenario", required=True, help="scenario manifest path")
    p.add_argument("--from", dest="origin", type=_lonlat, required=True, metavar="LON,LAT")
    p.set_defaults(func=cmd_lodging)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--scenario", required=True, help="scenario manifest preloaded at start")
    p.add_argument(
        "--listen",
        type=_listen,
        default=("127.0.0.1", 8080),
        metavar="ADDR:PORT",
        help="listen address (default 127.0.0.1:8080)",
    )
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        _note(f"error: {exc}")
        return 2
    except (FloodRouteError, ValueError) as exc:
        _note(f"error: {exc}")
        return 1
    except OSError as exc:
        _note(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
