"""Deterministic synthetic river-valley scenario.

A 40x30 DEM holds an east-flowing river in a V-shaped valley. Two parallel
roads join the west and east junctions: a shorter low road one terrace
above the river and a longer high road on the ridge. At the 13 ft flood
stage the low road stays dry; at a 20 ft crest it drowns and the ridge
road becomes the backup. A small segmentation pond in the northwest
exercises mask fusion without touching any road.

Everything is generated from closed-form rules, so tests and demos can
rebuild byte-identical inputs anywhere.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .imagery import ClassGrid, save_class_grid
from .raster import GridGeometry, RasterGrid, save_ascii_grid

__all__ = [
    "FLOOD_STAGE_FT",
    "CREST_FT",
    "LOW_ROAD_EDGES",
    "HIGH_ROAD_EDGES",
    "WEST_JUNCTION",
    "EAST_JUNCTION",
    "valley_geometry",
    "valley_dem",
    "valley_class_grid",
    "valley_roadnet_text",
    "write_valley_scenario",
]

# River levels exercised by the scenario: normal flood stage and the
# observed storm crest, in feet.
FLOOD_STAGE_FT = 13.0
CREST_FT = 20.0

LOW_ROAD_EDGES = ("low-east", "low-road", "low-west")
HIGH_ROAD_EDGES = ("high-east", "high-road", "high-west")

WEST_JUNCTION = "west-junction"
EAST_JUNCTION = "east-junction"

_COLS = 40
_ROWS = 30
_CELL = 0.01
_X0 = -79.2
_Y0 = 34.4
_RIVER_ROW = 15
_NODATA = -9999.0


def valley_geometry() -> GridGeometry:
    return GridGeometry(cols=_COLS, rows=_ROWS, x_origin=_X0, y_origin=_Y0, cell_size=_CELL)


def valley_dem() -> RasterGrid:
    """V-shaped valley: 1 m of rise per row away from the river, plus a
    0.003 m/column westward tilt so the river visibly flows east."""
    rows = np.arange(_ROWS, dtype=float)[:, None]
    cols = np.arange(_COLS, dtype=float)[None, :]
    values = 0.5 + np.abs(rows - _RIVER_ROW) + 0.003 * (_COLS - 1 - cols)
    values[0, 0:3] = _NODATA
    return RasterGrid(geometry=valley_geometry(), values=values, nodata=_NODATA)


def valley_class_grid() -> ClassGrid:
    """Segmentation layer: a pond in the dry northwest corner."""
    codes = np.zeros((_ROWS, _COLS), dtype=np.int64)
    codes[27:30, 2:5] = 1
    return ClassGrid(geometry=valley_geometry(), classes=codes, legend={0: "other", 1: "water"})


def _y(row_center: float) -> float:
    return _Y0 + row_center * _CELL


def _x(col_center: float) -> float:
    return _X0 + col_center * _CELL


def valley_roadnet_text() -> str:
    west, east = _x(0.5), _x(39.5)
    low_y, junction_y, high_y = _y(19.5), _y(22.5), _y(26.5)
    nodes = [
        {"id": WEST_JUNCTION, "lon": west, "lat": junction_y},
        {"id": EAST_JUNCTION, "lon": east, "lat": junction_y},
        {"id": "low-west-end", "lon": west, "lat": low_y},
        {"id": "low-east-end", "lon": east, "lat": low_y},
        {"id": "high-west-end", "lon": west, "lat": high_y},
        {"id": "high-east-end", "lon": east, "lat": high_y},
    ]
    edges = [
        {
            "id": "low-west",
            "from": WEST_JUNCTION,
            "to": "low-west-end",
            "polyline": [[west, junction_y], [west, low_y]],
        },
        {
            "id": "low-road",
            "from": "low-west-end",
            "to": "low-east-end",
            "polyline": [[west, low_y], [east, low_y]],
            "strength": 1.0,
            "name": "River Terrace Road",
        },
        {
            "id": "low-east",
            "from": "low-east-end",
            "to": EAST_JUNCTION,
            "polyline": [[east, low_y], [east, junction_y]],
        },
        {
            "id": "high-west",
            "from": WEST_JUNCTION,
            "to": "high-west-end",
            "polyline": [[west, junction_y], [west, high_y]],
        },
        {
            "id": "high-road",
            "from": "high-west-end",
            "to": "high-east-end",
            "polyline": [[west, high_y], [east, high_y]],
            "name": "Ridge Parkway",
        },
        {
            "id": "high-east",
            "from": "high-east-end",
            "to": EAST_JUNCTION,
            "polyline": [[east, high_y], [east, junction_y]],
        },
    ]
    pois = [
        {
            "id": "hotel-riverfront",
            "kind": "lodging",
            "lon": _x(20.0),
            "lat": _y(15.5),
            "name": "Riverfront Hotel",
        },
        {
            "id": "motel-lowmid",
            "kind": "lodging",
            "lon": _x(20.0),
            "lat": _y(19.6),
            "name": "Terrace Motel",
        },
        {
            "id": "inn-ridgetop",
            "kind": "lodging",
            "lon": _x(39.3),
            "lat": _y(26.4),
            "name": "Ridgetop Inn",
        },
        {
            "id": "shelter-west-high",
            "kind": "shelter",
            "lon": _x(0.6),
            "lat": _y(26.4),
            "name": "West Ridge Shelter",
        },
        {
            "id": "office-downtown",
            "kind": "building",
            "lon": _x(20.0),
            "lat": _y(22.5),
            "name": "Downtown Office",
        },
    ]
    doc = {"nodes": nodes, "edges": edges, "pois": pois}
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def write_valley_scenario(directory: str | Path, water_level_ft: float = FLOOD_STAGE_FT) -> Path:
    """Write the full scenario bundle into a directory; returns the manifest
    path. The manifest quotes the water level in feet on purpose, so the
    feet-to-meters path is exercised on every load."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    (directory / "dem.asc").write_bytes(save_ascii_grid(valley_dem()))
    grid_bytes, legend_bytes = save_class_grid(valley_class_grid())
    (directory / "segmentation.asc").write_bytes(grid_bytes)
    (directory / "segmentation.legend.json").write_bytes(legend_bytes)
    (directory / "roadnet.json").write_text(valley_roadnet_text(), encoding="utf-8")

    manifest = {
        "name": "synthetic-valley",
        "dem_path": "dem.asc",
        "roadnet_path": "roadnet.json",
        "class_grid_paths": [
            {
                "path": "segmentation.asc",
                "legend_path": "segmentation.legend.json",
                "water_class": "water",
            }
        ],
        "params": {
            "water_level_ft": water_level_ft,
            "seed_fraction": 0.02,
            "snap_radius_m": 500.0,
        },
    }
    manifest_path = directory / "manifest.json"
    manifest_path.write_text(
        json.dumps(manifest, sort_keys=True, separators=(",", ":")) + "\n", encoding="utf-8"
    )
    return manifest_path
