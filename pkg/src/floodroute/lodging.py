"""Flood-filtered, reachability-annotated, distance-ranked lodging options.

The pipeline is filter then rank: filter_lodging drops anything observed
flooded, rank_lodging snaps the survivors to the road graph and orders them
by flood-safe route distance. Points outside the mask extent count as dry,
since absence of observation is not evidence of flooding. Unreachable
options are listed rather than hidden; severed lodging is still
decision-relevant.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .inundation import FloodMask
from .raster import world_to_cell
from .roadnet import HazardOverlay, Poi, RoadGraph, nearest_node
from .routing import RouteRequest, shortest_route

__all__ = [
    "LODGING_KINDS",
    "LodgingOption",
    "filter_lodging",
    "rank_lodging",
    "lodging_to_json",
]

LODGING_KINDS = ("lodging", "shelter")


@dataclass(frozen=True)
class LodgingOption:
    """One candidate destination with flood and reachability verdicts."""

    poi: Poi
    flooded: bool
    reachable: bool
    route_length_m: float | None = None
    snap_node: str | None = None

    def __post_init__(self):
        if self.reachable and self.route_length_m is None:
            raise ValueError("reachable options must carry route_length_m")

    def record(self) -> dict:
        """Flat JSON record with the full seven-key schema."""
        return {
            "id": self.poi.id,
            "name": self.poi.name,
            "kind": self.poi.kind,
            "flooded": self.flooded,
            "reachable": self.reachable,
            "route_length_m": self.route_length_m,
            "snap_node": self.snap_node,
        }


def filter_lodging(pois: list[Poi], mask: FloodMask) -> list[Poi]:
    """Keep lodging/shelter pois whose containing mask cell is dry.

    Pois outside the mask extent are kept. Order is preserved.
    """
    kept = []
    for poi in pois:
        if poi.kind not in LODGING_KINDS:
            continue
        cell = world_to_cell(mask.geometry, poi.lon, poi.lat)
        if cell is not None and mask.flooded[cell.row, cell.col]:
            continue
        kept.append(poi)
    return kept


def rank_lodging(
    dry: list[Poi],
    graph: RoadGraph,
    overlay: HazardOverlay,
    origin: str,
    snap_radius_m: float,
) -> list[LodgingOption]:
    """Snap each poi to the graph and rank by flood-safe route distance.

    Reachable options come first, ascending by route_length_m with ties on
    poi id; unreachable ones (snapped-but-severed and unsnappable alike)
    follow, sorted by poi id.
    """
    if origin not in graph.nodes:
        raise ValueError(f"unknown origin node {origin!r}")

    reachable: list[LodgingOption] = []
    unreachable: list[LodgingOption] = []
    for poi in dry:
        snap = nearest_node(graph, poi.lon, poi.lat, snap_radius_m)
        if snap is None:
            unreachable.append(LodgingOption(poi=poi, flooded=False, reachable=False))
            continue
        route = shortest_route(graph, overlay, RouteRequest(origin, snap))
        if route is None:
            unreachable.append(
                LodgingOption(poi=poi, flooded=False, reachable=False, snap_node=snap)
            )
        else:
            reachable.append(
                LodgingOption(
                    poi=poi,
                    flooded=False,
                    reachable=True,
                    route_length_m=route.total_length_m,
                    snap_node=snap,
                )
            )

    reachable.sort(key=lambda o: (o.route_length_m, o.poi.id))
    unreachable.sort(key=lambda o: o.poi.id)
    return reachable + unreachable


def lodging_to_json(options: list[LodgingOption]) -> str:
    """Canonical JSON array of seven-key records, in the given order."""
    return json.dumps(
        [o.record() for o in options], sort_keys=True, separators=(",", ":")
    ) + "\n"
