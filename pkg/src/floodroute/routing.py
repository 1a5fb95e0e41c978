"""Shortest-path evacuation routing over the hazard-masked road graph.

Dijkstra with a binary heap is the routing engine. Determinism matters for
reproducible outputs, so ties are pinned down twice: equal-cost heap entries
extract the smaller node id first, and neighbors relax in edge-id order.
Unreachability is a normal result (None), not an error; flooding genuinely
severs towns and callers must be able to render "no safe route".
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field

from .roadnet import HazardOverlay, RoadGraph

__all__ = [
    "Route",
    "RouteRequest",
    "shortest_route",
    "backup_route",
    "route_to_geojson",
    "route_from_geojson",
]


@dataclass(frozen=True)
class Route:
    """A concrete path: n nodes joined by n-1 edges, with cost totals.

    total_cost is the routing objective (sum of length_m * strength);
    total_length_m is the physical distance actually driven.
    """

    node_ids: tuple[str, ...]
    edge_ids: tuple[str, ...]
    total_cost: float
    total_length_m: float

    def __post_init__(self):
        object.__setattr__(self, "node_ids", tuple(self.node_ids))
        object.__setattr__(self, "edge_ids", tuple(self.edge_ids))
        if len(self.node_ids) == 0:
            raise ValueError("a route must contain at least its origin node")
        if len(self.edge_ids) != len(self.node_ids) - 1:
            raise ValueError(
                f"route shape mismatch: {len(self.node_ids)} nodes need "
                f"{len(self.node_ids) - 1} edges, got {len(self.edge_ids)}"
            )

    @property
    def origin(self) -> str:
        return self.node_ids[0]

    @property
    def destination(self) -> str:
        return self.node_ids[-1]

    @property
    def is_empty(self) -> bool:
        return not self.edge_ids


@dataclass(frozen=True)
class RouteRequest:
    """Origin/destination plus operator-closed edges on top of the overlay."""

    origin_node: str
    destination_node: str
    closed_edges: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "closed_edges", frozenset(self.closed_edges))


def _validate_request(graph: RoadGraph, request: RouteRequest):
    for node_id in (request.origin_node, request.destination_node):
        if node_id not in graph.nodes:
            raise ValueError(f"unknown node id {node_id!r}")
    for edge_id in request.closed_edges:
        if edge_id not in graph.edges:
            raise ValueError(f"unknown closed edge id {edge_id!r}")


def shortest_route(
    graph: RoadGraph, overlay: HazardOverlay, request: RouteRequest
) -> Route | None:
    """Minimum-total_cost path over passable edges, or None if unreachable.

    Passable means neither blocked by the overlay nor listed in the
    request's closed_edges. An origin equal to the destination yields the
    empty route with cost 0.
    """
    _validate_request(graph, request)
    origin, destination = request.origin_node, request.destination_node
    if origin == destination:
        return Route(node_ids=(origin,), edge_ids=(), total_cost=0.0, total_length_m=0.0)

    adjacency = graph.adjacency()
    dist: dict[str, float] = {origin: 0.0}
    prev: dict[str, tuple[str, str]] = {}
    settled: set[str] = set()
    heap: list[tuple[float, str]] = [(0.0, origin)]
    while heap:
        cost, node = heapq.heappop(heap)
        if node in settled:
            continue
        settled.add(node)
        if node == destination:
            break
        for edge_id, other, weight in adjacency[node]:
            if edge_id in request.closed_edges or overlay.is_blocked(edge_id):
                continue
            candidate = cost + weight
            if other not in dist or candidate < dist[other]:
                dist[other] = candidate
                prev[other] = (node, edge_id)
                heapq.heappush(heap, (candidate, other))

    if destination not in settled:
        return None

    node_ids = [destination]
    edge_ids = []
    while node_ids[-1] != origin:
        parent, via = prev[node_ids[-1]]
        node_ids.append(parent)
        edge_ids.append(via)
    node_ids.reverse()
    edge_ids.reverse()

    total_cost = 0.0
    total_length = 0.0
    for edge_id in edge_ids:
        edge = graph.edges[edge_id]
        total_cost += edge.weight
        total_length += edge.length_m
    return Route(
        node_ids=tuple(node_ids),
        edge_ids=tuple(edge_ids),
        total_cost=total_cost,
        total_length_m=total_length,
    )


def backup_route(
    graph: RoadGraph,
    overlay: HazardOverlay,
    primary: Route,
    newly_closed: frozenset[str] | set[str],
    closed_edges: frozenset[str] | set[str] = frozenset(),
) -> Route | None:
    """Recompute after closures; the paper's delete-a-segment workflow.

    If none of the newly closed edges lie on the primary route, the primary
    is still valid and is returned unchanged. closed_edges carries any
    closures the primary was already computed under, since a Route does not
    remember its request.
    """
    newly = frozenset(newly_closed)
    if not newly & set(primary.edge_ids):
        return primary
    request = RouteRequest(
        origin_node=primary.origin,
        destination_node=primary.destination,
        closed_edges=frozenset(closed_edges) | newly,
    )
    return shortest_route(graph, overlay, request)


# --- GeoJSON ----------------------------------------------------------------


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def route_to_geojson(route: Route, graph: RoadGraph) -> str:
    """RFC 7946 FeatureCollection: one LineString per edge in route order,
    then a null-geometry summary Feature with the totals.

    Coordinates are copied verbatim from the stored polylines, without
    reorienting edges the route traverses backwards.
    """
    features = []
    for edge_id in route.edge_ids:
        if edge_id not in graph.edges:
            raise ValueError(f"route references edge {edge_id!r} absent from graph")
        edge = graph.edges[edge_id]
        features.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "LineString",
                    "coordinates": [[lon, lat] for lon, lat in edge.polyline],
                },
                "properties": {"edge_id": edge_id, "length_m": edge.length_m},
            }
        )
    features.append(
        {
            "type": "Feature",
            "geometry": None,
            "properties": {
                "summary": True,
                "origin": route.origin,
                "destination": route.destination,
                "total_cost": route.total_cost,
                "total_length_m": route.total_length_m,
            },
        }
    )
    return _canonical({"type": "FeatureCollection", "features": features})


def route_from_geojson(text: str | bytes, graph: RoadGraph) -> Route:
    """Rebuild a Route from route_to_geojson output and the same graph.

    The node sequence is reconstructed by walking the edge list from the
    summary's origin; totals are taken verbatim so a round trip is exact.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"route document is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise ValueError("route document must be a GeoJSON FeatureCollection")
    features = doc.get("features", [])
    if not features or not features[-1].get("properties", {}).get("summary"):
        raise ValueError("route document is missing the summary feature")
    summary = features[-1]["properties"]

    edge_ids = []
    for feature in features[:-1]:
        edge_id = feature.get("properties", {}).get("edge_id")
        if edge_id not in graph.edges:
            raise ValueError(f"route references edge {edge_id!r} absent from graph")
        edge_ids.append(edge_id)

    node_ids = [summary["origin"]]
    for edge_id in edge_ids:
        edge = graph.edges[edge_id]
        if node_ids[-1] == edge.from_node:
            node_ids.append(edge.to_node)
        elif node_ids[-1] == edge.to_node:
            node_ids.append(edge.from_node)
        else:
            raise ValueError(f"edge {edge_id!r} does not continue the route")
    if node_ids[-1] != summary["destination"]:
        raise ValueError("route does not end at the recorded destination")

    return Route(
        node_ids=tuple(node_ids),
        edge_ids=tuple(edge_ids),
        total_cost=float(summary["total_cost"]),
        total_length_m=float(summary["total_length_m"]),
    )
