"""Georeferenced grids, coordinate transforms, and ASCII-grid file I/O.

All rasters share one spatial convention: WGS84 lon/lat, square cells,
and row 0 as the *southernmost* row so that latitude increases with the
row index. The on-disk ESRI ASCII format stores the northern row first,
so the loader and writer flip row order at the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import GridParseError

__all__ = [
    "GridGeometry",
    "CellIndex",
    "RasterGrid",
    "load_ascii_grid",
    "save_ascii_grid",
    "world_to_cell",
    "cell_to_world",
    "resample_nearest",
]

DEFAULT_NODATA = -9999.0

_HEADER_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize")


@dataclass(frozen=True)
class GridGeometry:
    """Spatial frame of a raster: cell counts, lower-left corner, cell size.

    ``x_origin``/``y_origin`` are the lon/lat of the *corner* of cell
    (col 0, row 0), not its center. Cells are squares of ``cell_size``
    degrees. Two geometries are equal iff all five fields are exactly equal.
    """

    cols: int
    rows: int
    x_origin: float
    y_origin: float
    cell_size: float

    def __post_init__(self):
        if self.cols < 1 or self.rows < 1:
            raise ValueError(f"grid must have at least one cell, got {self.cols}x{self.rows}")
        if not (self.cell_size > 0):
            raise ValueError(f"cell_size must be positive, got {self.cell_size}")

    @property
    def shape(self) -> tuple[int, int]:
        """Numpy-style (rows, cols)."""
        return (self.rows, self.cols)

    @property
    def size(self) -> int:
        return self.rows * self.cols

    def contains(self, cell: "CellIndex") -> bool:
        return 0 <= cell.col < self.cols and 0 <= cell.row < self.rows


class CellIndex(NamedTuple):
    """0-based cell address; row 0 is the southernmost row."""

    col: int
    row: int


@dataclass(eq=False)
class RasterGrid:
    """A georeferenced grid of float cell values.

    ``values`` is a read-only (rows, cols) float array in row-major order
    with row 0 southernmost. Cells holding the ``nodata`` sentinel are
    missing; every other value must be finite.
    """

    geometry: GridGeometry
    values: np.ndarray
    nodata: float = DEFAULT_NODATA

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.size != self.geometry.size:
            raise ValueError(
                f"expected {self.geometry.size} values for a "
                f"{self.geometry.cols}x{self.geometry.rows} grid, got {values.size}"
            )
        values = values.reshape(self.geometry.shape)
        bad = ~np.isfinite(values) & ~self._nodata_mask_of(values)
        if bad.any():
            row, col = np.argwhere(bad)[0]
            raise ValueError(f"non-finite value at col {col}, row {row}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def _nodata_mask_of(self, values: np.ndarray) -> np.ndarray:
        if math.isnan(self.nodata):
            return np.isnan(values)
        return values == self.nodata

    @property
    def nodata_mask(self) -> np.ndarray:
        """Boolean (rows, cols) array marking missing cells."""
        return self._nodata_mask_of(self.values)

    def value_at(self, cell: CellIndex) -> float:
        if not self.geometry.contains(cell):
            raise ValueError(f"cell {tuple(cell)} outside {self.geometry.cols}x{self.geometry.rows} grid")
        return float(self.values[cell.row, cell.col])

    def __eq__(self, other) -> bool:
        if not isinstance(other, RasterGrid):
            return NotImplemented
        return (
            self.geometry == other.geometry
            and (self.nodata == other.nodata or (math.isnan(self.nodata) and math.isnan(other.nodata)))
            and np.array_equal(self.values, other.values, equal_nan=True)
        )


def _format_value(v: float) -> str:
    # Canonical: integral values as bare integers, everything else as the
    # shortest decimal that round-trips (Python float repr).
    v = float(v)
    if math.isfinite(v) and v == int(v):
        return str(int(v))
    return repr(v)


def load_ascii_grid(source: bytes | str) -> RasterGrid:
    """Parse an ESRI ASCII grid.

    Expects the five header lines ``ncols, nrows, xllcorner, yllcorner,
    cellsize`` in order (keywords case-insensitive), an optional
    ``NODATA_value`` line, then ``nrows`` data lines of ``ncols``
    whitespace-separated numbers each, northern row first.

    Raises :class:`GridParseError` naming the offending line on malformed
    headers, wrong value counts, or non-numeric tokens.
    """
    if isinstance(source, bytes):
        try:
            text = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise GridParseError(f"not a text grid file: {exc}") from None
    else:
        text = source
    lines = text.splitlines()

    header: dict[str, float] = {}
    lineno = 0
    for key in _HEADER_KEYS:
        if lineno >= len(lines):
            raise GridParseError(f"missing header line '{key}'", line=lineno + 1)
        parts = lines[lineno].split()
        if len(parts) != 2 or parts[0].lower() != key:
            raise GridParseError(f"expected header '{key} <value>', got {lines[lineno]!r}", line=lineno + 1)
        try:
            header[key] = float(parts[1])
        except ValueError:
            raise GridParseError(f"non-numeric header value {parts[1]!r} for '{key}'", line=lineno + 1) from None
        lineno += 1

    for key in ("ncols", "nrows"):
        if header[key] != int(header[key]) or header[key] < 1:
            raise GridParseError(f"'{key}' must be a positive integer, got {header[key]}")
    cols, rows = int(header["ncols"]), int(header["nrows"])
    if not header["cellsize"] > 0:
        raise GridParseError(f"'cellsize' must be positive, got {header['cellsize']}", line=5)

    nodata = DEFAULT_NODATA
    if lineno < len(lines):
        parts = lines[lineno].split()
        if parts and parts[0].lower() == "nodata_value":
            if len(parts) != 2:
                raise GridParseError(f"expected 'NODATA_value <value>', got {lines[lineno]!r}", line=lineno + 1)
            try:
                nodata = float(parts[1])
            except ValueError:
                raise GridParseError(f"non-numeric NODATA_value {parts[1]!r}", line=lineno + 1) from None
            lineno += 1

    data_rows: list[list[float]] = []
    for i in range(lineno, len(lines)):
        tokens = lines[i].split()
        if not tokens:
            continue
        if len(data_rows) == rows:
            raise GridParseError(f"more than {rows} data rows", line=i + 1)
        if len(tokens) != cols:
            raise GridParseError(
                f"data row {len(data_rows) + 1} has {len(tokens)} values, expected {cols}", line=i + 1
            )
        row_values = []
        for tok in tokens:
            try:
                row_values.append(float(tok))
            except ValueError:
                raise GridParseError(f"non-numeric token {tok!r}", line=i + 1) from None
        data_rows.append(row_values)

    if len(data_rows) != rows:
        raise GridParseError(f"found {len(data_rows)} data rows, expected {rows}")

    geometry = GridGeometry(
        cols=cols,
        rows=rows,
        x_origin=header["xllcorner"],
        y_origin=header["yllcorner"],
        cell_size=header["cellsize"],
    )
    values = np.array(data_rows, dtype=float)[::-1]  # file is north-first
    return RasterGrid(geometry=geometry, values=values, nodata=nodata)


def save_ascii_grid(grid: RasterGrid) -> bytes:
    """Serialize a grid to the canonical ESRI ASCII form.

    The output re-parses to an identical grid, and re-serializing the
    parsed grid reproduces the bytes exactly.
    """
    g = grid.geometry
    out = [
        f"ncols {g.cols}",
        f"nrows {g.rows}",
        f"xllcorner {_format_value(g.x_origin)}",
        f"yllcorner {_format_value(g.y_origin)}",
        f"cellsize {_format_value(g.cell_size)}",
        f"NODATA_value {_format_value(grid.nodata)}",
    ]
    for row in grid.values[::-1]:  # write north-first
        out.append(" ".join(_format_value(v) for v in row))
    return ("\n".join(out) + "\n").encode("utf-8")


def _axis_cell(origin: float, cell_size: float, count: int, coord: float) -> int | None:
    # A coordinate maps to the highest-index cell whose closed footprint
    # [origin + k*cs, origin + (k+1)*cs] contains it.
    u = (coord - origin) / cell_size
    if not math.isfinite(u):
        return None
    k0 = math.floor(u)
    best = None
    for k in (k0 - 1, k0, k0 + 1):
        if 0 <= k < count and origin + k * cell_size <= coord <= origin + (k + 1) * cell_size:
            best = k
    return best


def world_to_cell(geometry: GridGeometry, lon: float, lat: float) -> CellIndex | None:
    """Return the cell whose square footprint contains (lon, lat).

    Points on an interior shared boundary belong to the higher-index cell;
    points outside the grid extent map to None.
    """
    col = _axis_cell(geometry.x_origin, geometry.cell_size, geometry.cols, lon)
    row = _axis_cell(geometry.y_origin, geometry.cell_size, geometry.rows, lat)
    if col is None or row is None:
        return None
    return CellIndex(col=col, row=row)


def cell_to_world(geometry: GridGeometry, cell: CellIndex) -> tuple[float, float]:
    """Return the (lon, lat) of the cell's center. Out-of-bounds cells are an error."""
    if not geometry.contains(cell):
        raise ValueError(f"cell {tuple(cell)} outside {geometry.cols}x{geometry.rows} grid")
    lon = geometry.x_origin + (cell.col + 0.5) * geometry.cell_size
    lat = geometry.y_origin + (cell.row + 0.5) * geometry.cell_size
    return lon, lat


def resample_nearest(src: RasterGrid, target: GridGeometry) -> RasterGrid:
    """Resample ``src`` onto ``target``: each target cell takes the value of
    the source cell containing the target cell's center, or nodata when the
    center falls outside the source extent.
    """
    values = np.full(target.shape, src.nodata, dtype=float)
    for row in range(target.rows):
        for col in range(target.cols):
            lon, lat = cell_to_world(target, CellIndex(col, row))
            hit = world_to_cell(src.geometry, lon, lat)
            if hit is not None:
                values[row, col] = src.values[hit.row, hit.col]
    return RasterGrid(geometry=target, values=values, nodata=src.nodata)
