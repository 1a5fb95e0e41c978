"""Road-graph model, import/validation, polyline rasterization, and the
flood-overlay rule.

The overlay rule is deliberately conservative: an edge is blocked if any
amount of water touches it, i.e. if any cell of the edge's supercover is
flooded. The supercover includes every cell whose closed square footprint
the polyline touches, so corner clips count.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import RoadNetError
from .inundation import FloodMask
from .raster import CellIndex, GridGeometry

__all__ = [
    "EARTH_RADIUS_M",
    "DEFAULT_SNAP_RADIUS_M",
    "POI_KINDS",
    "Edge",
    "RoadGraph",
    "Poi",
    "HazardOverlay",
    "GraphReport",
    "load_roadnet",
    "load_pois",
    "edge_length",
    "edge_cells",
    "apply_flood_overlay",
    "nearest_node",
    "validate_graph",
    "haversine_m",
]

EARTH_RADIUS_M = 6_371_000.0

DEFAULT_SNAP_RADIUS_M = 500.0

POI_KINDS = ("shelter", "lodging", "building")

Point = tuple[float, float]


@dataclass(frozen=True)
class Edge:
    """Undirected road segment with geometry and routing weight inputs."""

    id: str
    from_node: str
    to_node: str
    polyline: tuple[Point, ...]
    length_m: float
    strength: float = 1.0
    name: str | None = None

    @property
    def weight(self) -> float:
        """Routing cost: great-circle length scaled by the strength factor."""
        return self.length_m * self.strength


@dataclass(frozen=True)
class RoadGraph:
    """Nodes (id -> lon/lat) and undirected edges (id -> Edge)."""

    nodes: dict[str, Point]
    edges: dict[str, Edge]

    def adjacency(self) -> dict[str, list[tuple[str, str, float]]]:
        """node -> [(edge_id, other_node, weight)], sorted by edge id.

        The fixed ordering makes relaxation deterministic under ties.
        """
        adj: dict[str, list[tuple[str, str, float]]] = {n: [] for n in self.nodes}
        for edge_id in sorted(self.edges):
            edge = self.edges[edge_id]
            adj[edge.from_node].append((edge_id, edge.to_node, edge.weight))
            adj[edge.to_node].append((edge_id, edge.from_node, edge.weight))
        return adj


@dataclass(frozen=True)
class Poi:
    """Point of interest: an evacuation shelter, a lodging option, or a building."""

    id: str
    kind: str
    lon: float
    lat: float
    name: str

    def __post_init__(self):
        if self.kind not in POI_KINDS:
            raise ValueError(f"poi kind must be one of {POI_KINDS}, got {self.kind!r}")


@dataclass(frozen=True)
class HazardOverlay:
    """Per-edge blocked/passable verdicts derived from one flood mask."""

    blocked: dict[str, bool]
    source_mask_geometry: GridGeometry | None = None

    @classmethod
    def clear(cls, graph: RoadGraph) -> "HazardOverlay":
        """All-passable overlay (no flood information)."""
        return cls(blocked={edge_id: False for edge_id in graph.edges})

    def is_blocked(self, edge_id: str) -> bool:
        return self.blocked[edge_id]

    def blocked_ids(self) -> set[str]:
        return {edge_id for edge_id, hit in self.blocked.items() if hit}


@dataclass(frozen=True)
class GraphReport:
    """Diagnostics from validate_graph; purely informational."""

    components: list[list[str]]
    isolated_nodes: list[str]
    zero_length_edges: list[str]

    @property
    def component_count(self) -> int:
        return len(self.components)


# --- distance ---------------------------------------------------------------


def haversine_m(lon1: float, lat1: float, lon2: float, lat2: float) -> float:
    """Great-circle distance in meters on a sphere of radius 6,371,000 m."""
    phi1, phi2 = math.radians(lat1), math.radians(lat2)
    dphi = phi2 - phi1
    dlam = math.radians(lon2 - lon1)
    a = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2) ** 2
    return EARTH_RADIUS_M * 2 * math.asin(math.sqrt(a))


def edge_length(polyline: list[Point] | tuple[Point, ...]) -> float:
    """Sum of great-circle segment lengths along a polyline, in meters."""
    if len(polyline) < 2:
        raise ValueError(f"polyline needs at least 2 points, got {len(polyline)}")
    return sum(
        haversine_m(x0, y0, x1, y1) for (x0, y0), (x1, y1) in zip(polyline, polyline[1:])
    )


# --- import -----------------------------------------------------------------


def _require(entry: dict, key: str, context: str):
    if key not in entry:
        raise RoadNetError(f"{context} missing required key {key!r}")
    return entry[key]


def _as_id(value, context: str) -> str:
    if not isinstance(value, str) or not value:
        raise RoadNetError(f"{context}: id must be a non-empty string, got {value!r}")
    return value


def _as_number(value, context: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise RoadNetError(f"{context}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise RoadNetError(f"{context}: number must be finite, got {value!r}")
    return float(value)


def _parse_document(source: bytes | str) -> dict:
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise RoadNetError(f"road network file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise RoadNetError("road network file must be a JSON object")
    return doc


def load_roadnet(source: bytes | str) -> RoadGraph:
    """Parse and validate the scenario road-network JSON.

    Every invariant violation is rejected with the offending id: dangling
    endpoints, short polylines, endpoint/polyline mismatches, non-positive
    length or strength, and duplicate ids.
    """
    doc = _parse_document(source)
    nodes: dict[str, Point] = {}
    for entry in doc.get("nodes", []):
        node_id = _as_id(_require(entry, "id", "node"), "node")
        if node_id in nodes:
            raise RoadNetError(f"duplicate node id {node_id!r}")
        lon = _as_number(_require(entry, "lon", f"node {node_id!r}"), f"node {node_id!r}")
        lat = _as_number(_require(entry, "lat", f"node {node_id!r}"), f"node {node_id!r}")
        nodes[node_id] = (lon, lat)

    edges: dict[str, Edge] = {}
    for entry in doc.get("edges", []):
        edge_id = _as_id(_require(entry, "id", "edge"), "edge")
        if edge_id in edges:
            raise RoadNetError(f"duplicate edge id {edge_id!r}")
        context = f"edge {edge_id!r}"
        from_node = _as_id(_require(entry, "from", context), context)
        to_node = _as_id(_require(entry, "to", context), context)
        for endpoint in (from_node, to_node):
            if endpoint not in nodes:
                raise RoadNetError(f"{context} references missing node {endpoint!r}")
        raw_polyline = _require(entry, "polyline", context)
        if not isinstance(raw_polyline, list) or len(raw_polyline) < 2:
            raise RoadNetError(f"{context} polyline needs at least 2 points")
        polyline = []
        for pt in raw_polyline:
            if not isinstance(pt, list) or len(pt) != 2:
                raise RoadNetError(f"{context} polyline points must be [lon, lat] pairs")
            polyline.append((_as_number(pt[0], context), _as_number(pt[1], context)))
        if polyline[0] != nodes[from_node] or polyline[-1] != nodes[to_node]:
            raise RoadNetError(
                f"{context} polyline endpoints do not match nodes "
                f"{from_node!r} and {to_node!r}"
            )
        strength = _as_number(entry.get("strength", 1.0), context)
        if not strength > 0:
            raise RoadNetError(f"{context} strength must be positive, got {strength}")
        length_m = edge_length(polyline)
        if not length_m > 0:
            raise RoadNetError(f"{context} has zero length (degenerate polyline)")
        name = entry.get("name")
        if name is not None and not isinstance(name, str):
            raise RoadNetError(f"{context} name must be a string")
        edges[edge_id] = Edge(
            id=edge_id,
            from_node=from_node,
            to_node=to_node,
            polyline=tuple(polyline),
            length_m=length_m,
            strength=strength,
            name=name,
        )

    return RoadGraph(nodes=nodes, edges=edges)


def load_pois(source: bytes | str) -> list[Poi]:
    """Parse the "pois" list of the road-network JSON (may be absent)."""
    doc = _parse_document(source)
    pois = []
    seen = set()
    for entry in doc.get("pois", []):
        poi_id = _as_id(_require(entry, "id", "poi"), "poi")
        if poi_id in seen:
            raise RoadNetError(f"duplicate poi id {poi_id!r}")
        seen.add(poi_id)
        context = f"poi {poi_id!r}"
        kind = _require(entry, "kind", context)
        if kind not in POI_KINDS:
            raise RoadNetError(f"{context} kind must be one of {POI_KINDS}, got {kind!r}")
        pois.append(
            Poi(
                id=poi_id,
                kind=kind,
                lon=_as_number(_require(entry, "lon", context), context),
                lat=_as_number(_require(entry, "lat", context), context),
                name=str(_require(entry, "name", context)),
            )
        )
    return pois


# --- rasterization ----------------------------------------------------------


def _axis_slab(lo_edges: np.ndarray, start: float, delta: float) -> tuple[np.ndarray, np.ndarray]:
    # Parameter interval [t0, t1] where the segment is inside each closed
    # slab [edge, edge+1]; empty intervals come out inverted.
    if delta == 0:
        inside = (lo_edges <= start) & (start <= lo_edges + 1)
        t0 = np.where(inside, 0.0, np.inf)
        t1 = np.where(inside, 1.0, -np.inf)
        return t0, t1
    with np.errstate(over="ignore"):
        # Subnormal deltas overflow to inf; the interval math treats that
        # correctly as a miss, so the warning is noise.
        ta = (lo_edges - start) / delta
        tb = (lo_edges + 1 - start) / delta
    return np.minimum(ta, tb), np.maximum(ta, tb)


def _segment_cells(u0: float, v0: float, u1: float, v1: float, cols: int, rows: int) -> set[CellIndex]:
    cmin = max(0, math.floor(min(u0, u1)) - 1)
    cmax = min(cols - 1, math.floor(max(u0, u1)) + 1)
    rmin = max(0, math.floor(min(v0, v1)) - 1)
    rmax = min(rows - 1, math.floor(max(v0, v1)) + 1)
    if cmin > cmax or rmin > rmax:
        return set()
    col_edges = np.arange(cmin, cmax + 1, dtype=float)
    row_edges = np.arange(rmin, rmax + 1, dtype=float)
    tx0, tx1 = _axis_slab(col_edges, u0, u1 - u0)
    ty0, ty1 = _axis_slab(row_edges, v0, v1 - v0)
    t_enter = np.maximum(np.maximum(tx0[None, :], ty0[:, None]), 0.0)
    t_exit = np.minimum(np.minimum(tx1[None, :], ty1[:, None]), 1.0)
    hit_rows, hit_cols = np.nonzero(t_enter <= t_exit)
    return {
        CellIndex(int(col_edges[c]), int(row_edges[r])) for r, c in zip(hit_rows, hit_cols)
    }


def edge_cells(polyline: list[Point] | tuple[Point, ...], geometry: GridGeometry) -> set[CellIndex]:
    """Conservative supercover of a polyline on a grid.

    Returns every in-grid cell whose closed square footprint intersects any
    segment, including touches at corners and edges. Cells outside the grid
    are silently omitted.
    """
    cs = geometry.cell_size
    cells: set[CellIndex] = set()
    points = [((x - geometry.x_origin) / cs, (y - geometry.y_origin) / cs) for x, y in polyline]
    if len(points) == 1:
        points = points * 2
    for (u0, v0), (u1, v1) in zip(points, points[1:]):
        cells |= _segment_cells(u0, v0, u1, v1, geometry.cols, geometry.rows)
    return cells


# --- overlay ----------------------------------------------------------------


def apply_flood_overlay(graph: RoadGraph, mask: FloodMask) -> HazardOverlay:
    """Blocked verdict per edge: any flooded cell under the edge's supercover
    blocks it. Edges wholly outside the mask extent stay passable.
    """
    blocked = {}
    for edge_id in sorted(graph.edges):
        edge = graph.edges[edge_id]
        cells = edge_cells(edge.polyline, mask.geometry)
        blocked[edge_id] = any(mask.flooded[c.row, c.col] for c in cells)
    return HazardOverlay(blocked=blocked, source_mask_geometry=mask.geometry)


# --- queries ----------------------------------------------------------------


def nearest_node(
    graph: RoadGraph, lon: float, lat: float, max_radius_m: float = DEFAULT_SNAP_RADIUS_M
) -> str | None:
    """Nearest node within the snap radius; ties break to the smaller id."""
    if not max_radius_m > 0:
        raise ValueError(f"max_radius_m must be positive, got {max_radius_m}")
    best: tuple[float, str] | None = None
    for node_id, (nlon, nlat) in graph.nodes.items():
        d = haversine_m(lon, lat, nlon, nlat)
        if d <= max_radius_m and (best is None or (d, node_id) < best):
            best = (d, node_id)
    return best[1] if best else None


def validate_graph(graph: RoadGraph) -> GraphReport:
    """Connected components, isolated nodes, and zero-length edges."""
    neighbors: dict[str, set[str]] = {n: set() for n in graph.nodes}
    for edge in graph.edges.values():
        neighbors[edge.from_node].add(edge.to_node)
        neighbors[edge.to_node].add(edge.from_node)

    components = []
    seen: set[str] = set()
    for start in sorted(graph.nodes):
        if start in seen:
            continue
        stack, component = [start], []
        seen.add(start)
        while stack:
            node = stack.pop()
            component.append(node)
            for other in neighbors[node]:
                if other not in seen:
                    seen.add(other)
                    stack.append(other)
        components.append(sorted(component))

    isolated = sorted(n for n, adj in neighbors.items() if not adj)
    zero_length = sorted(e.id for e in graph.edges.values() if e.length_m == 0)
    return GraphReport(components=components, isolated_nodes=isolated, zero_length_edges=zero_length)
