"""Flood masks from elevation data and a water level.

Two interpretations of the DEM-as-flooding-proxy are provided: a plain
threshold ("bathtub") model and a seed-connected fill that only floods
low cells hydrologically reachable from source cells. The connected
model is the pipeline default because the bathtub variant floods basins
no water can reach.

Water levels are meters internally; use :func:`feet_to_meters` at
ingestion points that accept feet.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import GeometryMismatch
from .raster import CellIndex, GridGeometry, RasterGrid

__all__ = [
    "FloodMask",
    "SeedSet",
    "feet_to_meters",
    "threshold_inundation",
    "connected_inundation",
    "default_seeds",
    "fuse_masks",
    "flooded_fraction",
    "DEFAULT_SEED_FRACTION",
]

METERS_PER_FOOT = 0.3048

DEFAULT_SEED_FRACTION = 0.02

# 4-neighborhood: flooding must not leak diagonally through one-cell barriers.
_CONNECTIVITY = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]])


def feet_to_meters(feet: float) -> float:
    return feet * METERS_PER_FOOT


@dataclass(eq=False)
class FloodMask:
    """Boolean grid marking flooded cells, aligned to a raster geometry."""

    geometry: GridGeometry
    flooded: np.ndarray

    def __post_init__(self):
        flooded = np.asarray(self.flooded, dtype=bool)
        if flooded.size != self.geometry.size:
            raise ValueError(
                f"expected {self.geometry.size} cells for a "
                f"{self.geometry.cols}x{self.geometry.rows} mask, got {flooded.size}"
            )
        flooded = flooded.reshape(self.geometry.shape)
        flooded.setflags(write=False)
        object.__setattr__(self, "flooded", flooded)

    @classmethod
    def all_dry(cls, geometry: GridGeometry) -> "FloodMask":
        return cls(geometry, np.zeros(geometry.shape, dtype=bool))

    def is_flooded(self, cell: CellIndex) -> bool:
        if not self.geometry.contains(cell):
            raise ValueError(f"cell {tuple(cell)} outside mask grid")
        return bool(self.flooded[cell.row, cell.col])

    def flooded_cells(self) -> list[CellIndex]:
        """Flooded cells in ascending (row, col) order."""
        return [CellIndex(int(c), int(r)) for r, c in np.argwhere(self.flooded)]

    def covers(self, other: "FloodMask") -> bool:
        """True if this mask floods every cell the other floods (same geometry)."""
        return self.geometry == other.geometry and bool((other.flooded & ~self.flooded).sum() == 0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FloodMask):
            return NotImplemented
        return self.geometry == other.geometry and np.array_equal(self.flooded, other.flooded)


@dataclass(frozen=True)
class SeedSet:
    """Hydrologic source cells (river-channel proxy) for connected fill."""

    cells: frozenset[CellIndex] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "cells", frozenset(self.cells))


def _below_level(dem: RasterGrid, water_level: float) -> np.ndarray:
    below = dem.values < water_level
    below &= ~dem.nodata_mask
    return below


def threshold_inundation(dem: RasterGrid, water_level: float) -> FloodMask:
    """Bathtub model: a cell floods iff its elevation is below the level.

    Nodata cells never flood.
    """
    return FloodMask(dem.geometry, _below_level(dem, water_level))


def connected_inundation(dem: RasterGrid, water_level: float, seeds: SeedSet) -> FloodMask:
    """Seed-connected fill: a cell floods iff it is below the level and
    reachable from a seed through a 4-connected chain of below-level cells.

    Seeds sitting above the water level flood nothing through themselves.
    """
    if not seeds.cells:
        raise ValueError("connected inundation requires a non-empty seed set")
    for cell in seeds.cells:
        if not dem.geometry.contains(cell):
            raise ValueError(f"seed cell {tuple(cell)} outside DEM grid")

    below = _below_level(dem, water_level)
    labels, _count = ndimage.label(below, structure=_CONNECTIVITY)
    seed_labels = {labels[c.row, c.col] for c in seeds.cells} - {0}
    if not seed_labels:
        return FloodMask.all_dry(dem.geometry)
    flooded = np.isin(labels, sorted(seed_labels))
    return FloodMask(dem.geometry, flooded)


def default_seeds(dem: RasterGrid, fraction: float = DEFAULT_SEED_FRACTION) -> SeedSet:
    """The lowest-elevation ceil(fraction * non-nodata-count) cells, a thin
    channel proxy when no explicit river cells are given.

    Ties at the cutoff elevation break by ascending (row, col).
    """
    if not 0 < fraction <= 1:
        raise ValueError(f"seed fraction must be in (0, 1], got {fraction}")
    valid = ~dem.nodata_mask
    count = int(valid.sum())
    if count == 0:
        raise ValueError("cannot derive seeds from an all-nodata grid")
    k = math.ceil(fraction * count)
    rows, cols = np.nonzero(valid)
    elevations = dem.values[rows, cols]
    order = np.lexsort((cols, rows, elevations))[:k]
    return SeedSet(frozenset(CellIndex(int(cols[i]), int(rows[i])) for i in order))


def fuse_masks(a: FloodMask, b: FloodMask) -> FloodMask:
    """Union of two aligned masks: flooding evidence from either source counts."""
    if a.geometry != b.geometry:
        raise GeometryMismatch(
            "mask geometries differ; align with imagery.align_mask or raster.resample_nearest first"
        )
    return FloodMask(a.geometry, a.flooded | b.flooded)


def flooded_fraction(mask: FloodMask) -> float:
    """Flooded cell count over total cell count, in [0, 1]."""
    return int(mask.flooded.sum()) / mask.flooded.size
