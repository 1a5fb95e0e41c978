"""Overhead-image products: class grids, RGB tiles, and color-rule extraction.

Segmentation products arrive as class-grid files (ASCII grid of integer
codes plus a JSON legend); no network inference happens here. A color-rule
classifier covers the map-tile path where buildings and roads share one
RGB value and can only be extracted jointly.

Images are plain PPM (P6) with a JSON geometry sidecar. Like rasters,
pixel row 0 is the southernmost row internally; the PPM file stores the
northern row first.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import GridParseError
from .inundation import FloodMask
from .raster import GridGeometry, RasterGrid, load_ascii_grid, resample_nearest, save_ascii_grid

__all__ = [
    "ClassGrid",
    "RgbImage",
    "ColorRule",
    "CANONICAL_CLASSES",
    "BUILDING_OR_ROAD",
    "ingest_class_grid",
    "save_class_grid",
    "load_legend",
    "save_legend",
    "classify_by_color",
    "class_to_flood_mask",
    "align_mask",
    "load_ppm",
    "save_ppm",
    "load_geometry_sidecar",
    "save_geometry_sidecar",
    "read_image",
    "write_image",
    "load_color_rules",
]

# Every legend carries these, whatever else the producer used.
CANONICAL_CLASSES = ("water", "building", "road", "other")

# Map tiles render buildings and roads with the same RGB, so color
# extraction can only produce the combined class.
BUILDING_OR_ROAD = "building_or_road"

_CLASS_GRID_NODATA = -9999.0


def _complete_legend(legend: dict[int, str]) -> dict[int, str]:
    completed = dict(legend)
    present = set(completed.values())
    next_code = 0
    for name in CANONICAL_CLASSES:
        if name in present:
            continue
        while next_code in completed:
            next_code += 1
        completed[next_code] = name
        next_code += 1
    return completed


@dataclass(eq=False)
class ClassGrid:
    """Per-cell class codes with a code -> name legend.

    The legend always contains the four canonical class names; missing
    ones are assigned unused codes at construction so downstream lookups
    by name never fail.
    """

    geometry: GridGeometry
    classes: np.ndarray
    legend: dict[int, str]

    def __post_init__(self):
        classes = np.asarray(self.classes, dtype=int)
        if classes.size != self.geometry.size:
            raise ValueError(
                f"expected {self.geometry.size} class codes, got {classes.size}"
            )
        classes = classes.reshape(self.geometry.shape)
        legend = _complete_legend({int(k): str(v) for k, v in self.legend.items()})
        used = np.unique(classes)
        missing = [int(code) for code in used if int(code) not in legend]
        if missing:
            rows, cols = np.nonzero(classes == missing[0])
            raise GridParseError(
                f"class code {missing[0]} at col {cols[0]}, row {rows[0]} not in legend"
            )
        classes.setflags(write=False)
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "legend", legend)

    def codes_named(self, name: str) -> list[int]:
        return sorted(code for code, n in self.legend.items() if n == name)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ClassGrid):
            return NotImplemented
        return (
            self.geometry == other.geometry
            and np.array_equal(self.classes, other.classes)
            and self.legend == other.legend
        )


@dataclass(eq=False)
class RgbImage:
    """Georeferenced 8-bit RGB raster; pixel row 0 is the southern row."""

    width: int
    height: int
    pixels: np.ndarray
    geometry: GridGeometry

    def __post_init__(self):
        pixels = np.asarray(self.pixels, dtype=np.uint8)
        if pixels.shape != (self.height, self.width, 3):
            raise ValueError(
                f"expected pixel array of shape {(self.height, self.width, 3)}, got {pixels.shape}"
            )
        if (self.geometry.cols, self.geometry.rows) != (self.width, self.height):
            raise ValueError(
                f"geometry {self.geometry.cols}x{self.geometry.rows} does not match "
                f"image {self.width}x{self.height}"
            )
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RgbImage):
            return NotImplemented
        return self.geometry == other.geometry and np.array_equal(self.pixels, other.pixels)


@dataclass(frozen=True)
class ColorRule:
    """Match pixels within a per-channel absolute tolerance of an RGB target."""

    class_name: str
    r: int
    g: int
    b: int
    tolerance: int = 0

    def __post_init__(self):
        for channel in (self.r, self.g, self.b):
            if not 0 <= channel <= 255:
                raise ValueError(f"channel value {channel} outside [0, 255]")
        if not 0 <= self.tolerance <= 255:
            raise ValueError(f"tolerance {self.tolerance} outside [0, 255]")


# --- class-grid I/O ---------------------------------------------------------


def ingest_class_grid(source: bytes, legend: dict[int, str]) -> ClassGrid:
    """Parse an ASCII grid of integer class codes against a legend.

    Codes absent from the legend are rejected naming the code and cell.
    """
    raster = load_ascii_grid(source)
    values = raster.values
    fractional = values != np.floor(values)
    if fractional.any():
        r, c = np.argwhere(fractional)[0]
        raise GridParseError(f"non-integer class code {values[r, c]} at col {c}, row {r}")
    return ClassGrid(geometry=raster.geometry, classes=values.astype(int), legend=legend)


def save_class_grid(grid: ClassGrid) -> tuple[bytes, bytes]:
    """Serialize to (ASCII grid bytes, legend JSON bytes), both canonical."""
    raster = RasterGrid(
        geometry=grid.geometry, values=grid.classes.astype(float), nodata=_CLASS_GRID_NODATA
    )
    return save_ascii_grid(raster), save_legend(grid.legend)


def load_legend(data: bytes) -> dict[int, str]:
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise GridParseError(f"legend is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise GridParseError("legend must be a JSON object of code -> name")
    legend = {}
    for key, name in raw.items():
        try:
            code = int(key)
        except ValueError:
            raise GridParseError(f"legend key {key!r} is not an integer code") from None
        if not isinstance(name, str):
            raise GridParseError(f"legend name for code {code} must be a string")
        legend[code] = name
    return legend


def save_legend(legend: dict[int, str]) -> bytes:
    payload = {str(code): name for code, name in legend.items()}
    return (json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n").encode("utf-8")


# --- color classification ----------------------------------------------------


def classify_by_color(image: RgbImage, rules: list[ColorRule]) -> ClassGrid:
    """First-match classification of each pixel against an ordered rule list.

    Unmatched pixels get "other". Output geometry equals the image geometry.
    """
    legend = {0: "other"}
    code_of = {"other": 0}
    classes = np.zeros((image.height, image.width), dtype=int)
    unassigned = np.ones((image.height, image.width), dtype=bool)
    pixels = image.pixels.astype(int)
    for rule in rules:
        if rule.class_name not in code_of:
            code = max(legend) + 1
            legend[code] = rule.class_name
            code_of[rule.class_name] = code
        target = np.array([rule.r, rule.g, rule.b])
        matches = (np.abs(pixels - target) <= rule.tolerance).all(axis=2)
        take = matches & unassigned
        classes[take] = code_of[rule.class_name]
        unassigned &= ~matches
    return ClassGrid(geometry=image.geometry, classes=classes, legend=legend)


def class_to_flood_mask(grid: ClassGrid, water_class: str = "water") -> FloodMask:
    """Mark every cell whose class name equals ``water_class`` as flooded."""
    codes = grid.codes_named(water_class)
    if not codes:
        raise ValueError(f"class name {water_class!r} not in legend")
    return FloodMask(grid.geometry, np.isin(grid.classes, codes))


def align_mask(mask: FloodMask, target: GridGeometry) -> FloodMask:
    """Nearest-neighbor alignment of a mask onto a target frame.

    Target cells whose centers fall outside the mask extent come out dry.
    """
    as_raster = RasterGrid(
        geometry=mask.geometry, values=mask.flooded.astype(float), nodata=-1.0
    )
    resampled = resample_nearest(as_raster, target)
    return FloodMask(target, resampled.values == 1.0)


# --- PPM (P6) image I/O -------------------------------------------------------


def load_ppm(data: bytes, geometry: GridGeometry) -> RgbImage:
    """Parse a binary P6 PPM with maxval 255 and bind it to a geometry."""
    tokens = []
    pos = 0
    while len(tokens) < 4:
        if pos >= len(data):
            raise GridParseError("truncated PPM header")
        ch = data[pos : pos + 1]
        if ch == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
        elif ch.isspace():
            pos += 1
        else:
            start = pos
            while pos < len(data) and not data[pos : pos + 1].isspace():
                pos += 1
            tokens.append(data[start:pos])
    if tokens[0] != b"P6":
        raise GridParseError(f"not a P6 PPM (magic {tokens[0]!r})")
    try:
        width, height, maxval = (int(t) for t in tokens[1:4])
    except ValueError:
        raise GridParseError("non-numeric PPM dimensions") from None
    if maxval != 255:
        raise GridParseError(f"unsupported PPM maxval {maxval} (expected 255)")
    pos += 1  # single whitespace byte after maxval
    raw = data[pos : pos + width * height * 3]
    if len(raw) != width * height * 3:
        raise GridParseError(
            f"expected {width * height * 3} pixel bytes, found {len(raw)}"
        )
    pixels = np.frombuffer(raw, dtype=np.uint8).reshape(height, width, 3)[::-1]
    return RgbImage(width=width, height=height, pixels=pixels, geometry=geometry)


def save_ppm(image: RgbImage) -> bytes:
    header = f"P6\n{image.width} {image.height}\n255\n".encode("ascii")
    return header + image.pixels[::-1].tobytes()


def load_geometry_sidecar(data: bytes) -> GridGeometry:
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise GridParseError(f"geometry sidecar is not valid JSON: {exc}") from None
    try:
        return GridGeometry(
            cols=int(raw["ncols"]),
            rows=int(raw["nrows"]),
            x_origin=float(raw["xllcorner"]),
            y_origin=float(raw["yllcorner"]),
            cell_size=float(raw["cellsize"]),
        )
    except KeyError as exc:
        raise GridParseError(f"geometry sidecar missing key {exc}") from None


def save_geometry_sidecar(geometry: GridGeometry) -> bytes:
    payload = {
        "ncols": geometry.cols,
        "nrows": geometry.rows,
        "xllcorner": geometry.x_origin,
        "yllcorner": geometry.y_origin,
        "cellsize": geometry.cell_size,
    }
    return (json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n").encode("utf-8")


def sidecar_path(image_path: str | Path) -> Path:
    return Path(image_path).with_suffix(".geom.json")


def read_image(image_path: str | Path) -> RgbImage:
    """Read a PPM and its ``<stem>.geom.json`` sidecar from disk."""
    image_path = Path(image_path)
    geometry = load_geometry_sidecar(sidecar_path(image_path).read_bytes())
    return load_ppm(image_path.read_bytes(), geometry)


def write_image(image: RgbImage, image_path: str | Path) -> None:
    image_path = Path(image_path)
    image_path.write_bytes(save_ppm(image))
    sidecar_path(image_path).write_bytes(save_geometry_sidecar(image.geometry))


def load_color_rules(data: bytes) -> list[ColorRule]:
    """Parse a JSON list of color rules.

    Each entry: {"class_name", "r", "g", "b", "tolerance"?}.
    """
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise GridParseError(f"rules file is not valid JSON: {exc}") from None
    if not isinstance(raw, list):
        raise GridParseError("rules file must be a JSON list")
    rules = []
    for i, entry in enumerate(raw):
        try:
            rules.append(
                ColorRule(
                    class_name=str(entry["class_name"]),
                    r=int(entry["r"]),
                    g=int(entry["g"]),
                    b=int(entry["b"]),
                    tolerance=int(entry.get("tolerance", 0)),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise GridParseError(f"bad color rule at index {i}: {exc}") from None
    return rules
